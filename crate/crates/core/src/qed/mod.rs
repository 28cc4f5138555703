//! Indistinguishability of photons from a dephased emitter in a lossy cavity.

pub mod dynamics;
pub mod indist;
pub mod linalg;
pub mod map;
pub mod quadrature;
pub mod rates;
pub mod threshold;

use thiserror::Error;

pub use dynamics::{single_excitation_trajectory, two_time_correlation, CouplingPhase, PopulationTrajectory};
pub use indist::{indistinguishability, IndistResult, Method, DEFAULT_TOL};
pub use map::{indist_map, iso_region, IsoRegion, MapGrid};
pub use rates::{coupling_regime, photon_transfer_rate, CouplingRegime, RateSet};
pub use threshold::{min_coupling_threshold, SearchBounds, ThresholdResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QedError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate emission: {0}")]
    DegenerateEmission(String),
    #[error("quadrature did not converge within {panels} panels (last estimate {last_estimate})")]
    ConvergenceFailure { last_estimate: f64, panels: usize },
    #[error("target {target} unreachable within bounds (best {best})")]
    UnreachableTarget { target: f64, best: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}
