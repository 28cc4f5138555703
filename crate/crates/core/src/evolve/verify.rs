//! Surrogate-driven search followed by physics re-evaluation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_ga, EvolveError, GAConfig, GAResult};
use crate::photonics::{evaluate_geometry, CavityFigures, CavityGeometry, EmitterSpec, IndexModel};
use crate::surrogate::SurrogateModel;

pub const DEFAULT_TOP_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub omega: Vec<f64>,
    pub surrogate_indist: f64,
    pub physics: Option<CavityFigures>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ga: GAResult,
    pub candidates: Vec<Candidate>,
    /// Index into `candidates` of the best physics-verified I.
    pub winner: usize,
    pub winner_figures: CavityFigures,
    pub resonance_shift_nm: f64,
    pub baseline: Option<CavityFigures>,
    pub surrogate_evaluations: usize,
    pub physics_evaluations: usize,
    /// Physics calls an equally sized GA would need without the surrogate.
    pub all_physics_equivalent: usize,
}

impl VerifyReport {
    pub fn physics_reduction(&self) -> f64 {
        self.all_physics_equivalent as f64 / self.physics_evaluations as f64
    }
}

/// Runs the GA on the surrogate, re-evaluates the `top_k` best distinct
/// genomes of the final population with the physics pipeline and picks the
/// winner by physics I. The uniform template is evaluated too, as the
/// reference.
pub fn optimize_and_verify(
    config: &GAConfig,
    surrogate: &SurrogateModel,
    template: &CavityGeometry,
    emitter: &EmitterSpec,
    model: &IndexModel,
    top_k: usize,
    qed_tol: f64,
) -> Result<VerifyReport, EvolveError> {
    if surrogate.input_size() != template.periods {
        return Err(EvolveError::DimensionMismatch { expected: surrogate.input_size(), got: template.periods });
    }
    if top_k == 0 {
        return Err(EvolveError::InvalidConfig("top_k must be positive".into()));
    }
    let ga = run_ga(|w| surrogate.predict(w).unwrap_or(f64::NAN), template.periods, config)?;

    let mut picked: Vec<(Vec<f64>, f64)> = Vec::new();
    for (w, f) in &ga.final_population {
        if picked.len() == top_k {
            break;
        }
        if f.is_finite() && !picked.iter().any(|(p, _)| p == w) {
            picked.push((w.clone(), *f));
        }
    }
    let candidates: Vec<Candidate> = picked
        .par_iter()
        .map(|(w, f)| match evaluate_geometry(&template.with_widths(w), emitter, model, qed_tol) {
            Ok(fig) => Candidate { omega: w.clone(), surrogate_indist: *f, physics: Some(fig), error: None },
            Err(e) => Candidate { omega: w.clone(), surrogate_indist: *f, physics: None, error: Some(e.to_string()) },
        })
        .collect();
    let baseline = evaluate_geometry(template, emitter, model, qed_tol).ok();

    let winner = candidates
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.physics.as_ref().map(|p| (i, p.indist)))
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .ok_or_else(|| EvolveError::VerificationFailure {
            causes: candidates.iter().filter_map(|c| c.error.clone()).collect(),
        })?;
    let winner_figures = candidates[winner].physics.clone().unwrap();
    let resonance_shift_nm = winner_figures.resonance_shift_nm(template);
    let physics_evaluations = candidates.len() + 1;
    Ok(VerifyReport {
        surrogate_evaluations: ga.evaluation_count,
        all_physics_equivalent: ga.evaluation_count,
        ga,
        candidates,
        winner,
        winner_figures,
        resonance_shift_nm,
        baseline,
        physics_evaluations,
    })
}
