//! Run configuration documents.

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::evolve::{GAConfig, DEFAULT_TOP_K};
use crate::photonics::{calibrate_index_model, CalibrationTargets, CavityGeometry, EmitterSpec, IndexModel};
use crate::qed::DEFAULT_TOL;
use crate::surrogate::TrainConfig;

/// Dataset size used when none is configured.
pub const DEFAULT_DATASET_SIZE: usize = 5000;
/// Environment variable consulted for the default worker count.
pub const JOBS_ENV: &str = "SLOTBRAGG_JOBS";

/// A preset name or a full inline description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EmitterChoice {
    Preset(String),
    Inline(EmitterSpec),
}

impl EmitterChoice {
    pub fn resolve(&self) -> Result<EmitterSpec, PipelineError> {
        let spec = match self {
            EmitterChoice::Inline(spec) => spec.clone(),
            EmitterChoice::Preset(name) if name == "molecule" => {
                return Err(PipelineError::Config(
                    "the molecule preset has no default oscillator strength; give an inline emitter".into(),
                ))
            }
            EmitterChoice::Preset(name) => EmitterSpec::preset(name).ok_or_else(|| {
                PipelineError::Config(format!(
                    "unknown emitter preset '{name}' (known: {})",
                    EmitterSpec::preset_names().join(", ")
                ))
            })?,
        };
        spec.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoPaths {
    pub dataset: Option<String>,
    pub model: Option<String>,
    pub report: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub emitter: EmitterChoice,
    pub geometry: CavityGeometry,
    /// Explicit index model; mutually exclusive with `calibrate`.
    pub index_model: Option<IndexModel>,
    pub calibrate: bool,
    pub calibration: CalibrationTargets,
    pub qed_tol: f64,
    pub hidden_layers: Vec<usize>,
    pub train: TrainConfig,
    pub ga: GAConfig,
    pub top_k: usize,
    pub dataset_size: usize,
    pub paths: IoPaths,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            emitter: EmitterChoice::Preset("rt801".into()),
            geometry: CavityGeometry::baseline_801(20.0, 20),
            index_model: None,
            calibrate: true,
            calibration: CalibrationTargets::default(),
            qed_tol: DEFAULT_TOL,
            hidden_layers: vec![64, 64],
            train: TrainConfig::default(),
            ga: GAConfig::default(),
            top_k: DEFAULT_TOP_K,
            dataset_size: DEFAULT_DATASET_SIZE,
            paths: IoPaths::default(),
            seed: 0,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| PipelineError::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &str) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io(format!("{path}: {e}")))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        self.emitter.resolve()?;
        self.geometry.validate(None).map_err(|e| PipelineError::Config(e.to_string()))?;
        match (&self.index_model, self.calibrate) {
            (Some(_), true) => return bad("give either index_model or calibrate: true, not both".into()),
            (None, false) => return bad("no index model: set calibrate: true or give index_model".into()),
            (Some(m), false) => m.validate().map_err(|e| PipelineError::Config(e.to_string()))?,
            (None, true) => {}
        }
        if !(self.qed_tol > 0.0 && self.qed_tol <= 1e-3) {
            return bad(format!("qed_tol must lie in (0, 1e-3], got {}", self.qed_tol));
        }
        if self.hidden_layers.contains(&0) {
            return bad("hidden layer sizes must be positive".into());
        }
        self.train.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.ga.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.top_k == 0 || self.dataset_size == 0 {
            return bad("top_k and dataset_size must be positive".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be >= 1".into());
        }
        Ok(())
    }

    pub fn emitter_spec(&self) -> Result<EmitterSpec, PipelineError> {
        self.emitter.resolve()
    }

    /// The explicit model, or a fresh calibration.
    pub fn index_model(&self) -> Result<IndexModel, PipelineError> {
        match &self.index_model {
            Some(m) => Ok(m.clone()),
            None => calibrate_index_model(&self.calibration).map_err(|e| PipelineError::Numerical(e.to_string())),
        }
    }

    /// Network layer sizes for the template's period count.
    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.geometry.periods).chain(self.hidden_layers.iter().copied()).chain([1]).collect()
    }

    pub fn resolve_jobs(&self, flag: Option<usize>) -> Result<usize, PipelineError> {
        resolve_jobs(flag.or(self.jobs))
    }
}

/// Flag, then environment, then the machine's parallelism.
pub fn resolve_jobs(flag: Option<usize>) -> Result<usize, PipelineError> {
    if let Some(j) = flag {
        return if j >= 1 { Ok(j) } else { Err(PipelineError::Config("jobs must be >= 1".into())) };
    }
    if let Ok(v) = std::env::var(JOBS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(j) if j >= 1 => Ok(j),
            _ => Err(PipelineError::Config(format!("{JOBS_ENV} must be a positive integer, got '{v}'"))),
        };
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}
