//! Multilayer-perceptron surrogate mapping corrugation widths to I.

pub mod dataset;
pub mod io;
pub mod model;
pub mod train;

use thiserror::Error;

pub use dataset::{Dataset, DatasetMeta, DatasetRow, RowFigures};
pub use io::{from_json, load, save, save_with_provenance, to_json, to_json_with_provenance, FORMAT_VERSION};
pub use model::{gradient_check, init_model, Activation, SurrogateModel};
pub use train::{train, TrainConfig, TrainHistory};

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("input has {got} features, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("training diverged at epoch {epoch}")]
    TrainingDiverged { epoch: usize },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unsupported model file version {found} (this build reads {supported})")]
    UnsupportedVersion { found: u64, supported: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
