//! JSON model files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{Activation, SurrogateModel};
use super::SurrogateError;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    version: u64,
    layer_sizes: Vec<usize>,
    activation: Activation,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    input_mean: Vec<f64>,
    input_std: Vec<f64>,
    seed: u64,
    /// Free-form record of how the model was produced; ignored on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<serde_json::Value>,
}

/// Byte offset of a serde_json error position (1-based line and column).
fn byte_offset(text: &str, e: &serde_json::Error) -> usize {
    if e.line() == 0 {
        return text.len();
    }
    let line_start: usize = text.split_inclusive('\n').take(e.line() - 1).map(str::len).sum();
    (line_start + e.column().saturating_sub(1)).min(text.len())
}

fn parse_error(text: &str, e: serde_json::Error) -> SurrogateError {
    SurrogateError::Parse { offset: byte_offset(text, &e), message: e.to_string() }
}

pub fn to_json(model: &SurrogateModel) -> Result<String, SurrogateError> {
    to_json_with_provenance(model, None)
}

pub fn to_json_with_provenance(
    model: &SurrogateModel,
    provenance: Option<serde_json::Value>,
) -> Result<String, SurrogateError> {
    model.validate()?;
    let file = ModelFile {
        version: FORMAT_VERSION,
        layer_sizes: model.layer_sizes.clone(),
        activation: model.activation,
        weights: model.weights.clone(),
        biases: model.biases.clone(),
        input_mean: model.input_mean.clone(),
        input_std: model.input_std.clone(),
        seed: model.seed,
        provenance,
    };
    serde_json::to_string_pretty(&file).map_err(|e| SurrogateError::InvalidModel(e.to_string()))
}

/// Parses a model file: syntax first, then the version, then the schema
/// and the layer shapes. Nothing is returned unless every check passes.
pub fn from_json(text: &str) -> Result<SurrogateModel, SurrogateError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    match value.get("version").and_then(serde_json::Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(found) => return Err(SurrogateError::UnsupportedVersion { found, supported: FORMAT_VERSION }),
        None => return Err(SurrogateError::Parse { offset: 0, message: "missing integer field `version`".into() }),
    }
    let f: ModelFile = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    let model = SurrogateModel {
        layer_sizes: f.layer_sizes,
        activation: f.activation,
        weights: f.weights,
        biases: f.biases,
        input_mean: f.input_mean,
        input_std: f.input_std,
        seed: f.seed,
    };
    model.validate()?;
    Ok(model)
}

pub fn save(model: &SurrogateModel, path: impl AsRef<Path>) -> Result<(), SurrogateError> {
    save_with_provenance(model, None, path)
}

pub fn save_with_provenance(
    model: &SurrogateModel,
    provenance: Option<serde_json::Value>,
    path: impl AsRef<Path>,
) -> Result<(), SurrogateError> {
    let mut text = to_json_with_provenance(model, provenance)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<SurrogateModel, SurrogateError> {
    from_json(&std::fs::read_to_string(path)?)
}
