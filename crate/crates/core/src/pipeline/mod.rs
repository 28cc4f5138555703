//! Configuration, persistence and the end-to-end commands behind the binary.

pub mod commands;
pub mod config;
pub mod provenance;

use thiserror::Error;

pub use commands::*;
pub use config::{resolve_jobs, EmitterChoice, IoPaths, RunConfig, DEFAULT_DATASET_SIZE, JOBS_ENV};
pub use provenance::Provenance;

use crate::evolve::EvolveError;
use crate::photonics::{EvaluationError, PhotonicsError};
use crate::qed::QedError;
use crate::surrogate::SurrogateError;

/// Failure classes with stable process exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O failure: {0}")]
    Io(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Numerical(_) => 3,
            PipelineError::Io(_) => 4,
        }
    }
}

impl From<QedError> for PipelineError {
    fn from(e: QedError) -> Self {
        match e {
            QedError::InvalidInput(_) => PipelineError::Config(e.to_string()),
            _ => PipelineError::Numerical(e.to_string()),
        }
    }
}

fn is_invalid_input(e: &PhotonicsError) -> bool {
    matches!(
        e,
        PhotonicsError::InvalidGeometry(_) | PhotonicsError::InvalidEmitter(_) | PhotonicsError::InvalidCalibration(_)
    )
}

impl From<PhotonicsError> for PipelineError {
    fn from(e: PhotonicsError) -> Self {
        if is_invalid_input(&e) {
            PipelineError::Config(e.to_string())
        } else {
            PipelineError::Numerical(e.to_string())
        }
    }
}

impl From<EvaluationError> for PipelineError {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::Photonics { ref source, .. } if is_invalid_input(source) => PipelineError::Config(e.to_string()),
            EvaluationError::Qed { source: QedError::InvalidInput(_), .. } => PipelineError::Config(e.to_string()),
            _ => PipelineError::Numerical(e.to_string()),
        }
    }
}

impl From<SurrogateError> for PipelineError {
    fn from(e: SurrogateError) -> Self {
        match e {
            SurrogateError::Io(_) => PipelineError::Io(e.to_string()),
            SurrogateError::TrainingDiverged { .. } => PipelineError::Numerical(e.to_string()),
            _ => PipelineError::Config(e.to_string()),
        }
    }
}

impl From<EvolveError> for PipelineError {
    fn from(e: EvolveError) -> Self {
        match e {
            EvolveError::VerificationFailure { .. } => PipelineError::Numerical(e.to_string()),
            _ => PipelineError::Config(e.to_string()),
        }
    }
}
