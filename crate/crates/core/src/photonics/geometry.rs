//! Geometry, index-model and emitter descriptions.
//!
//! All three round-trip through JSON with snake_case field names; unknown
//! fields are rejected at parse time.

use serde::{Deserialize, Serialize};

use super::PhotonicsError;

/// Slot-Bragg cavity layout. Lengths in nanometres.
///
/// `corrugation_widths_nm[i]` is the width of the i-th corrugation counted
/// outward from the cavity; the same vector is applied to both reflectors.
///
/// `waveguide_width_nm` and `thickness_nm` are carried for provenance only.
/// The longitudinal transfer-matrix model does not use them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityGeometry {
    pub slot_width_nm: f64,
    pub waveguide_width_nm: f64,
    pub periods: usize,
    pub period_nm: f64,
    pub cavity_length_nm: f64,
    pub thickness_nm: f64,
    pub target_wavelength_nm: f64,
    pub corrugation_widths_nm: Vec<f64>,
}

/// Nominal corrugation width used for uniform baselines.
pub const NOMINAL_CORRUGATION_NM: f64 = 50.0;

impl CavityGeometry {
    /// The 801 nm evaluation layout, (t, L, Λ) = (800, 230, 230) nm, with
    /// uniform corrugations.
    pub fn baseline_801(slot_width_nm: f64, periods: usize) -> Self {
        Self {
            slot_width_nm,
            waveguide_width_nm: 140.0,
            periods,
            period_nm: 230.0,
            cavity_length_nm: 230.0,
            thickness_nm: 800.0,
            target_wavelength_nm: 801.0,
            corrugation_widths_nm: vec![NOMINAL_CORRUGATION_NM; periods],
        }
    }

    /// Same layout with a different corrugation vector. The period count
    /// follows the vector length.
    pub fn with_widths(&self, widths: &[f64]) -> Self {
        Self {
            periods: widths.len(),
            corrugation_widths_nm: widths.to_vec(),
            ..self.clone()
        }
    }

    /// Same layout with `periods` uniform corrugations of width `width_nm`.
    pub fn with_uniform_periods(&self, periods: usize, width_nm: f64) -> Self {
        Self {
            periods,
            corrugation_widths_nm: vec![width_nm; periods],
            ..self.clone()
        }
    }

    pub fn total_length_nm(&self) -> f64 {
        2.0 * self.periods as f64 * self.period_nm + self.cavity_length_nm
    }

    pub fn validate(&self, bounds: Option<(f64, f64)>) -> Result<(), PhotonicsError> {
        let lengths = [
            ("slot_width_nm", self.slot_width_nm),
            ("waveguide_width_nm", self.waveguide_width_nm),
            ("period_nm", self.period_nm),
            ("cavity_length_nm", self.cavity_length_nm),
            ("thickness_nm", self.thickness_nm),
            ("target_wavelength_nm", self.target_wavelength_nm),
        ];
        for (name, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return Err(PhotonicsError::InvalidGeometry(format!(
                    "{name} must be a positive finite length, got {v}"
                )));
            }
        }
        if self.periods == 0 {
            return Err(PhotonicsError::InvalidGeometry("periods must be >= 1".into()));
        }
        if self.corrugation_widths_nm.len() != self.periods {
            return Err(PhotonicsError::InvalidGeometry(format!(
                "corrugation_widths_nm has {} entries but periods = {}",
                self.corrugation_widths_nm.len(),
                self.periods
            )));
        }
        for (i, &w) in self.corrugation_widths_nm.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(PhotonicsError::InvalidGeometry(format!(
                    "corrugation {i} width must be positive, got {w}"
                )));
            }
            if let Some((lo, hi)) = bounds {
                if w < lo || w > hi {
                    return Err(PhotonicsError::InvalidGeometry(format!(
                        "corrugation {i} width {w} nm outside [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Calibrated one-dimensional effective-index model of the slot waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexModel {
    /// Effective index of an un-corrugated slot segment.
    pub n_slot_mode: f64,
    /// Index change per nm of corrugation width.
    pub slope_per_nm: f64,
    /// Corrugation width at which the index equals `n_slot_mode`.
    pub w_ref_nm: f64,
    /// Transverse effective area at zero slot width, A₀.
    pub veff_area_nm2: f64,
    /// e-folding slot width of the transverse area: A(ω_s) = A₀·exp(ω_s / w).
    pub veff_slot_decay_nm: f64,
    /// Intrinsic (absorption/scattering) quality factor; `None` is lossless.
    pub q_loss: Option<f64>,
}

impl IndexModel {
    pub fn validate(&self) -> Result<(), PhotonicsError> {
        let bad = |msg: String| Err(PhotonicsError::InvalidCalibration(msg));
        if !(self.n_slot_mode.is_finite() && self.n_slot_mode > 1.0) {
            return bad(format!("n_slot_mode must exceed 1, got {}", self.n_slot_mode));
        }
        if !self.slope_per_nm.is_finite() || !self.w_ref_nm.is_finite() {
            return bad("slope and reference width must be finite".into());
        }
        if !(self.veff_area_nm2.is_finite() && self.veff_area_nm2 > 0.0) {
            return bad(format!("veff_area_nm2 must be positive, got {}", self.veff_area_nm2));
        }
        if !(self.veff_slot_decay_nm.is_finite() && self.veff_slot_decay_nm > 0.0) {
            return bad(format!(
                "veff_slot_decay_nm must be positive, got {}",
                self.veff_slot_decay_nm
            ));
        }
        if let Some(q) = self.q_loss {
            if !(q > 0.0) {
                return bad(format!("q_loss must be positive, got {q}"));
            }
        }
        Ok(())
    }

    /// Effective index of a corrugated segment of width `width_nm`.
    pub fn corrugated_index(&self, width_nm: f64) -> f64 {
        self.n_slot_mode + self.slope_per_nm * (width_nm - self.w_ref_nm)
    }

    /// Transverse effective area for a slot of width `slot_width_nm`.
    pub fn effective_area_nm2(&self, slot_width_nm: f64) -> f64 {
        self.veff_area_nm2 * (slot_width_nm / self.veff_slot_decay_nm).exp()
    }

    pub fn lossless(&self) -> Self {
        Self { q_loss: None, ..self.clone() }
    }
}

/// A quantum emitter. Rates are absolute; `gammastar_over_gamma` is the pure
/// dephasing ratio at the operating temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSpec {
    pub name: String,
    pub wavelength_nm: f64,
    pub oscillator_strength: f64,
    pub gammastar_over_gamma: f64,
    /// Exciton effective mass in units of the free-electron mass.
    pub effective_mass: f64,
    /// Relative permittivity at the emitter location.
    pub epsilon_source: f64,
    /// Absolute radiative rate γ in s⁻¹.
    pub radiative_rate_hz: f64,
}

/// Assumed radiative lifetime when none is known: 1 ns.
pub const DEFAULT_RADIATIVE_RATE_HZ: f64 = 1.0e9;

impl EmitterSpec {
    pub fn validate(&self) -> Result<(), PhotonicsError> {
        let bad = |msg: String| Err(PhotonicsError::InvalidEmitter(msg));
        if !(self.oscillator_strength.is_finite() && self.oscillator_strength > 0.0) {
            return bad(format!(
                "oscillator_strength must be positive, got {}",
                self.oscillator_strength
            ));
        }
        if !(self.wavelength_nm.is_finite() && self.wavelength_nm > 0.0) {
            return bad(format!("wavelength_nm must be positive, got {}", self.wavelength_nm));
        }
        if !(self.radiative_rate_hz.is_finite() && self.radiative_rate_hz > 0.0) {
            return bad(format!(
                "radiative_rate_hz must be positive, got {}",
                self.radiative_rate_hz
            ));
        }
        if !(self.epsilon_source.is_finite() && self.epsilon_source >= 1.0) {
            return bad(format!("epsilon_source must be >= 1, got {}", self.epsilon_source));
        }
        if !(self.effective_mass.is_finite() && self.effective_mass > 0.0) {
            return bad(format!("effective_mass must be positive, got {}", self.effective_mass));
        }
        if !(self.gammastar_over_gamma.is_finite() && self.gammastar_over_gamma >= 0.0) {
            return bad(format!(
                "gammastar_over_gamma must be >= 0, got {}",
                self.gammastar_over_gamma
            ));
        }
        Ok(())
    }

    /// Looks up a shipped preset by name. Molecules have no known oscillator
    /// strength, so `"molecule"` takes it as an argument through
    /// [`EmitterSpec::molecule`] and is not returned here.
    pub fn preset(name: &str) -> Option<Self> {
        let (wavelength_nm, gammastar, f) = match name {
            "ingaas" => (915.0, 600.0, 5.0),
            "gaas" => (916.0, 1450.0, 1.0),
            "tmdc" => (728.0, 1.0e4, 0.1),
            "diamond" => (685.0, 1.0e3, 5.0),
            "rt801" => (801.0, 1.0e4, 5.0),
            _ => return None,
        };
        Some(Self::with_defaults(name, wavelength_nm, gammastar, f))
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["ingaas", "gaas", "tmdc", "diamond", "rt801", "molecule"]
    }

    /// Single organic molecule at 785 nm, γ* = 10⁴γ, with a caller-supplied
    /// oscillator strength.
    pub fn molecule(oscillator_strength: f64) -> Self {
        Self::with_defaults("molecule", 785.0, 1.0e4, oscillator_strength)
    }

    fn with_defaults(name: &str, wavelength_nm: f64, gammastar: f64, f: f64) -> Self {
        Self {
            name: name.to_string(),
            wavelength_nm,
            oscillator_strength: f,
            gammastar_over_gamma: gammastar,
            effective_mass: 1.0,
            epsilon_source: 1.0,
            radiative_rate_hz: DEFAULT_RADIATIVE_RATE_HZ,
        }
    }

    /// Geometry preset (λ, t, L, Λ) matched to this emitter's wavelength,
    /// when one is tabulated.
    pub fn matched_layout(&self) -> Option<(f64, f64, f64, f64)> {
        match self.name.as_str() {
            "ingaas" => Some((915.0, 900.0, 263.0, 263.0)),
            "gaas" => Some((916.0, 900.0, 263.0, 263.0)),
            "tmdc" => Some((728.0, 710.0, 210.0, 210.0)),
            "molecule" => Some((785.0, 770.0, 225.0, 225.0)),
            "diamond" => Some((685.0, 680.0, 195.0, 195.0)),
            "rt801" => Some((801.0, 800.0, 230.0, 230.0)),
            _ => None,
        }
    }
}
