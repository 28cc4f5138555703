//! Longitudinal transfer-matrix model of the slot-Bragg cavity.

pub mod calibrate;
pub mod evaluate;
pub mod figures;
pub mod geometry;
pub mod mode;
pub mod resonance;
pub mod stack;
pub mod tmm;

use thiserror::Error;

pub use calibrate::{calibrate_index_model, CalibrationTargets};
pub use evaluate::{evaluate_geometry, CavityFigures, EvaluationError, Stage};
pub use geometry::{CavityGeometry, EmitterSpec, IndexModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhotonicsError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid index model: {0}")]
    InvalidCalibration(String),
    #[error("invalid emitter: {0}")]
    InvalidEmitter(String),
    #[error("no resonance: {0}")]
    NoResonance(String),
    #[error("unresolved linewidth: {0}")]
    UnresolvedLinewidth(String),
    #[error("inconsistent loss: {0}")]
    InconsistentLoss(String),
    #[error("calibration failed: {0}")]
    CalibrationFailure(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}
