//! Two-anchor calibration of the effective-index model.
//!
//! With `w_ref = 0` every index in the stack is proportional to
//! `(n_slot_mode, slope)`. Scaling both by s maps the spectrum λ → sλ and
//! leaves Q unchanged, so Q depends on the contrast `slope / n_slot_mode`
//! alone. The contrast is bisected for the Q anchor, then the pair is rescaled
//! to put the resonance on the target wavelength. The transverse area follows
//! from the mode-volume anchors.

use serde::{Deserialize, Serialize};

use super::evaluate::search_window;
use super::geometry::{CavityGeometry, IndexModel, NOMINAL_CORRUGATION_NM};
use super::mode::{field_profile, mode_volume};
use super::resonance::{find_resonance, Resonance};
use super::stack::build_stack;
use super::PhotonicsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationTargets {
    /// Layout whose slot width and period count are overridden per anchor.
    pub template: CavityGeometry,
    pub q_periods: usize,
    pub q_target: f64,
    pub veff_slot_nm: f64,
    pub veff_periods: usize,
    pub veff_target: f64,
    /// Second mode-volume point fixing the exponential slot dependence.
    pub wide_slot_nm: f64,
    pub wide_veff_target: f64,
    pub q_loss: Option<f64>,
    /// Starting guesses. A zero slope is allowed; the bracket grows from it.
    pub n_guess: f64,
    pub slope_guess: f64,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        Self {
            template: CavityGeometry::baseline_801(20.0, 20),
            q_periods: 10,
            q_target: 50.0,
            veff_slot_nm: 20.0,
            veff_periods: 20,
            veff_target: 7e-3,
            wide_slot_nm: 54.0,
            wide_veff_target: 6e-2,
            q_loss: Some(1e5),
            n_guess: 1.74,
            slope_guess: 1e-3,
        }
    }
}

impl CalibrationTargets {
    fn validate(&self) -> Result<(), PhotonicsError> {
        let bad = |m: &str| Err(PhotonicsError::InvalidCalibration(m.into()));
        self.template.validate(None)?;
        if self.q_periods == 0 || self.veff_periods == 0 {
            return bad("anchor period counts must be >= 1");
        }
        let positive = [
            self.q_target,
            self.veff_slot_nm,
            self.veff_target,
            self.wide_slot_nm,
            self.wide_veff_target,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("calibration targets must be positive and finite");
        }
        if self.wide_slot_nm == self.veff_slot_nm || self.wide_veff_target == self.veff_target {
            return bad("the two mode-volume anchors must differ");
        }
        if (self.wide_veff_target / self.veff_target).ln() / (self.wide_slot_nm - self.veff_slot_nm) <= 0.0 {
            return bad("mode volume must grow with slot width");
        }
        if !(self.n_guess.is_finite() && self.n_guess > 1.0) || !(self.slope_guess.is_finite() && self.slope_guess >= 0.0) {
            return bad("n_guess must exceed 1 and slope_guess must be >= 0");
        }
        Ok(())
    }
}

const MAX_BRACKET_STEPS: usize = 60;
const BISECTION_STEPS: usize = 80;

fn port_resonance(geometry: &CavityGeometry, model: &IndexModel) -> Result<Resonance, PhotonicsError> {
    let stack = build_stack(geometry, model)?;
    find_resonance(&stack, search_window(geometry, model))
}

pub fn calibrate_index_model(targets: &CalibrationTargets) -> Result<IndexModel, PhotonicsError> {
    targets.validate()?;
    let q_geom = targets
        .template
        .with_uniform_periods(targets.q_periods, NOMINAL_CORRUGATION_NM);
    let mut model = IndexModel {
        n_slot_mode: targets.n_guess,
        slope_per_nm: 0.0,
        w_ref_nm: 0.0,
        veff_area_nm2: 1.0,
        veff_slot_decay_nm: 1.0,
        q_loss: None,
    };
    // Too little contrast shows up as a low Q or as no resolvable line.
    let q_at = |slope: f64| -> Option<f64> {
        let m = IndexModel { slope_per_nm: slope, ..model.clone() };
        port_resonance(&q_geom, &m).ok().map(|r| r.q)
    };
    let reaches = |slope: f64| q_at(slope).is_some_and(|q| q >= targets.q_target);

    let mut hi = if targets.slope_guess > 0.0 { targets.slope_guess } else { 1e-5 };
    let mut lo = 0.0;
    let mut steps = 0;
    while !reaches(hi) {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        // Indices have to stay physical while the bracket grows.
        if steps > MAX_BRACKET_STEPS || hi * NOMINAL_CORRUGATION_NM > 4.0 * model.n_slot_mode {
            return Err(PhotonicsError::CalibrationFailure(format!(
                "Q = {} at {} periods not reached before slope {hi:e}/nm",
                targets.q_target, targets.q_periods
            )));
        }
    }
    if lo == 0.0 {
        // the guess was already above target: shrink towards zero
        lo = hi;
        while reaches(lo) {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-12 {
                return Err(PhotonicsError::CalibrationFailure("Q target reached at vanishing contrast".into()));
            }
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    model.slope_per_nm = hi;

    let res = port_resonance(&q_geom, &model)?;
    let scale = targets.template.target_wavelength_nm / res.lambda0_nm;
    model.n_slot_mode *= scale;
    model.slope_per_nm *= scale;

    // Area anchor on the baseline layout; the slot dependence from the ratio
    // of the two mode-volume anchors.
    let decay = (targets.wide_slot_nm - targets.veff_slot_nm) / (targets.wide_veff_target / targets.veff_target).ln();
    model.veff_slot_decay_nm = decay;
    let base = targets
        .template
        .with_uniform_periods(targets.veff_periods, NOMINAL_CORRUGATION_NM);
    let base = CavityGeometry { slot_width_nm: targets.veff_slot_nm, ..base };
    let stack = build_stack(&base, &model)?;
    let res = find_resonance(&stack, search_window(&base, &model))?;
    let unit_area = IndexModel { veff_area_nm2: 1.0, ..model.clone() };
    let v = mode_volume(&field_profile(&stack, res.lambda0_nm), &unit_area, base.slot_width_nm, res.lambda0_nm)?;
    model.veff_area_nm2 = targets.veff_target / v.veff_norm;
    model.q_loss = targets.q_loss;
    model.validate()?;
    Ok(model)
}
