//! Geometry → spectrum → resonance → mode volume → rates → indistinguishability.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::figures::{beta_factor, cavity_kappa, coupling_g, loaded_q, purcell_factor};
use super::geometry::{CavityGeometry, EmitterSpec, IndexModel};
use super::mode::{field_profile, mode_volume};
use super::resonance::find_resonance;
use super::stack::build_stack;
use super::PhotonicsError;
use crate::qed::{indistinguishability, Method, QedError, RateSet};

/// Fraction of the estimated half stopband searched on each side of the
/// Bragg wavelength. The band edges themselves are excluded.
pub const WINDOW_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Validation,
    Stack,
    Resonance,
    ModeVolume,
    Coupling,
    Loss,
    Indistinguishability,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Validation => "validation",
            Stage::Stack => "stack",
            Stage::Resonance => "resonance",
            Stage::ModeVolume => "mode_volume",
            Stage::Coupling => "coupling",
            Stage::Loss => "loss",
            Stage::Indistinguishability => "indistinguishability",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvaluationError {
    #[error("{stage} stage: {source}")]
    Photonics { stage: Stage, source: PhotonicsError },
    #[error("{stage} stage: {source}")]
    Qed { stage: Stage, source: QedError },
}

impl EvaluationError {
    pub fn stage(&self) -> Stage {
        match self {
            Self::Photonics { stage, .. } | Self::Qed { stage, .. } => *stage,
        }
    }
}

fn at(stage: Stage) -> impl Fn(PhotonicsError) -> EvaluationError {
    move |source| EvaluationError::Photonics { stage, source }
}

/// Every figure of one evaluated geometry.
///
/// `q` is the port-limited quality factor read off the lossless spectrum;
/// `q_total` adds the model's intrinsic loss in parallel and sets κ and β.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityFigures {
    pub lambda0_nm: f64,
    pub fwhm_nm: f64,
    pub q: f64,
    pub q_total: f64,
    pub peak_transmission: f64,
    pub mode_length_nm: f64,
    pub mode_area_nm2: f64,
    pub veff_norm: f64,
    pub g_over_gamma: f64,
    pub kappa_over_gamma: f64,
    pub gammastar_over_gamma: f64,
    pub purcell: f64,
    pub beta: f64,
    pub indist: f64,
}

impl CavityFigures {
    /// Resonance displacement from the geometry's target wavelength.
    pub fn resonance_shift_nm(&self, geometry: &CavityGeometry) -> f64 {
        self.lambda0_nm - geometry.target_wavelength_nm
    }
}

/// Bragg wavelength 2Λn̄ of the mirrors and the search window around it.
pub fn search_window(geometry: &CavityGeometry, model: &IndexModel) -> (f64, f64) {
    let n0 = model.n_slot_mode;
    let widths = &geometry.corrugation_widths_nm;
    let n_corr = widths.iter().map(|&w| model.corrugated_index(w)).sum::<f64>() / widths.len() as f64;
    let n_mean = 0.5 * (n_corr + n0);
    let lambda_b = 2.0 * geometry.period_nm * n_mean;
    let half_gap = lambda_b * (n_corr - n0).abs() / (std::f64::consts::PI * n_mean);
    let half = (WINDOW_FRACTION * half_gap).max(1e-4 * lambda_b);
    (lambda_b - half, lambda_b + half)
}

pub fn evaluate_geometry(
    geometry: &CavityGeometry,
    emitter: &EmitterSpec,
    model: &IndexModel,
    qed_tol: f64,
) -> Result<CavityFigures, EvaluationError> {
    geometry.validate(None).map_err(at(Stage::Validation))?;
    emitter.validate().map_err(at(Stage::Validation))?;
    model.validate().map_err(at(Stage::Validation))?;

    let ports = model.lossless();
    let stack = build_stack(geometry, &ports).map_err(at(Stage::Stack))?;
    let res = find_resonance(&stack, search_window(geometry, &ports)).map_err(at(Stage::Resonance))?;

    let profile = field_profile(&stack, res.lambda0_nm);
    let mode = mode_volume(&profile, model, geometry.slot_width_nm, res.lambda0_nm).map_err(at(Stage::ModeVolume))?;

    let q_total = loaded_q(res.q, model.q_loss);
    let beta = beta_factor(q_total, model.q_loss).map_err(at(Stage::Loss))?;
    let g = coupling_g(emitter, mode.veff_norm, res.lambda0_nm, model.n_slot_mode).map_err(at(Stage::Coupling))?;
    let kappa = cavity_kappa(res.lambda0_nm, q_total, emitter).map_err(at(Stage::Coupling))?;

    let qed = |source| EvaluationError::Qed { stage: Stage::Indistinguishability, source };
    let rates = RateSet::new(g, kappa, emitter.gammastar_over_gamma).map_err(qed)?;
    let indist = indistinguishability(&rates, Method::Eigen, qed_tol).map_err(qed)?;

    Ok(CavityFigures {
        lambda0_nm: res.lambda0_nm,
        fwhm_nm: res.fwhm_nm,
        q: res.q,
        q_total,
        peak_transmission: res.peak_transmission,
        mode_length_nm: mode.length_nm,
        mode_area_nm2: mode.area_nm2,
        veff_norm: mode.veff_norm,
        g_over_gamma: g,
        kappa_over_gamma: kappa,
        gammastar_over_gamma: emitter.gammastar_over_gamma,
        purcell: purcell_factor(q_total, mode.veff_norm),
        beta,
        indist: indist.indist.clamp(0.0, 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonics::calibrate::{calibrate_index_model, CalibrationTargets};
    use crate::photonics::tmm::transmission;
    use std::sync::OnceLock;

    fn model() -> &'static IndexModel {
        static M: OnceLock<IndexModel> = OnceLock::new();
        M.get_or_init(|| calibrate_index_model(&CalibrationTargets::default()).unwrap())
    }

    fn emitter() -> EmitterSpec {
        EmitterSpec::preset("rt801").unwrap()
    }

    #[test]
    fn evaluation_is_bit_reproducible() {
        let g = CavityGeometry::baseline_801(20.0, 12);
        let a = evaluate_geometry(&g, &emitter(), model(), 1e-6).unwrap();
        let b = evaluate_geometry(&g, &emitter(), model(), 1e-6).unwrap();
        assert_eq!(a, b);
        assert!(a.q > 0.0 && a.veff_norm > 0.0 && (0.0..=1.0).contains(&a.beta));
        assert!((a.q - a.lambda0_nm / a.fwhm_nm).abs() < 1e-9 * a.q);
    }

    #[test]
    fn coupling_times_root_volume_is_constant() {
        let e = emitter();
        let mut products = Vec::new();
        for (ws, p) in [(10.0, 10), (25.0, 14), (40.0, 20)] {
            let f = evaluate_geometry(&CavityGeometry::baseline_801(ws, p), &e, model(), 1e-6).unwrap();
            // V in nm³ carries the λ₀ dependence of the normalisation unit
            let v = f.veff_norm * (f.lambda0_nm / (2.0 * model().n_slot_mode)).powi(3);
            products.push(f.g_over_gamma * v.sqrt());
        }
        for p in &products[1..] {
            assert!((p / products[0] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn flat_index_fails_in_the_resonance_stage() {
        let flat = IndexModel { slope_per_nm: 0.0, ..model().clone() };
        let err = evaluate_geometry(&CavityGeometry::baseline_801(20.0, 10), &emitter(), &flat, 1e-6).unwrap_err();
        assert_eq!(err.stage(), Stage::Resonance);
        assert!(err.to_string().starts_with("resonance stage"));
    }

    #[test]
    fn invalid_inputs_fail_validation() {
        let mut g = CavityGeometry::baseline_801(20.0, 10);
        g.corrugation_widths_nm.pop();
        let err = evaluate_geometry(&g, &emitter(), model(), 1e-6).unwrap_err();
        assert_eq!(err.stage(), Stage::Validation);
        let bad_tol = evaluate_geometry(&CavityGeometry::baseline_801(20.0, 10), &emitter(), model(), 0.5).unwrap_err();
        assert_eq!(bad_tol.stage(), Stage::Indistinguishability);
    }

    #[test]
    fn absorbing_stack_linewidth_matches_the_loaded_q() {
        let g = CavityGeometry::baseline_801(20.0, 30);
        let f = evaluate_geometry(&g, &emitter(), model(), 1e-6).unwrap();
        let lossy = build_stack(&g, model()).unwrap();
        let r = find_resonance(&lossy, search_window(&g, model())).unwrap();
        assert!((r.q / f.q_total - 1.0).abs() < 0.02, "{} vs {}", r.q, f.q_total);
        assert!(transmission(&lossy, r.lambda0_nm) < f.peak_transmission);
    }

    #[test]
    fn shift_is_measured_from_the_target() {
        let g = CavityGeometry::baseline_801(20.0, 10);
        let f = evaluate_geometry(&g, &emitter(), model(), 1e-6).unwrap();
        assert!(f.resonance_shift_nm(&g).abs() < 1e-6);
    }
}
