//! Version, config hash and seed stamped into every output.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "slotbragg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Hex SHA-256 of the compact JSON of `config`.
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub config: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Provenance {
    pub fn new<T: Serialize>(command: &str, config: &T, seed: Option<u64>) -> Self {
        let config = serde_json::to_value(config).expect("configs serialize");
        let text = serde_json::to_string(&config).expect("values serialize");
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config_sha256: sha256_hex(text.as_bytes()),
            seed,
            config,
        }
    }

    /// Comment lines for CSV headers, without the `# ` marker.
    pub fn comments(&self) -> Vec<String> {
        vec![
            format!("tool: {} {}", self.tool, self.version),
            format!("command: {}", self.command),
            format!("seed: {}", self.seed.map_or("none".to_string(), |s| s.to_string())),
            format!("config_sha256: {}", self.config_sha256),
            format!("config: {}", serde_json::to_string(&self.config).expect("values serialize")),
        ]
    }

    /// `{"provenance": ..., key: value}`.
    pub fn wrap<T: Serialize>(&self, key: &str, value: &T) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("provenance".into(), serde_json::to_value(self).expect("provenance serializes"));
        map.insert(key.into(), serde_json::to_value(value).expect("results serialize"));
        Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_matches_known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn hash_tracks_the_config() {
        let a = Provenance::new("x", &serde_json::json!({"seed": 1}), Some(1));
        let b = Provenance::new("x", &serde_json::json!({"seed": 2}), Some(1));
        assert_ne!(a.config_sha256, b.config_sha256);
        assert_eq!(a, Provenance::new("x", &serde_json::json!({"seed": 1}), Some(1)));
        assert!(a.comments()[0].starts_with("tool: slotbragg "));
    }
}
