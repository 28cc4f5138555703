use serde::{Deserialize, Serialize};

use super::QedError;

/// Emitter-cavity rates in units of the radiative rate γ, which is 1.
///
/// The emitter is always resonant with the cavity; there is no detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSet {
    pub g_over_gamma: f64,
    pub kappa_over_gamma: f64,
    pub gammastar_over_gamma: f64,
}

impl RateSet {
    pub fn new(g: f64, kappa: f64, gammastar: f64) -> Result<Self, QedError> {
        let r = Self { g_over_gamma: g, kappa_over_gamma: kappa, gammastar_over_gamma: gammastar };
        r.validate()?;
        Ok(r)
    }

    /// Builds the dimensionless set from absolute rates sharing one unit.
    pub fn from_absolute(g: f64, kappa: f64, gamma: f64, gammastar: f64) -> Result<Self, QedError> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(QedError::InvalidInput(format!("radiative rate must be positive, got {gamma}")));
        }
        Self::new(g / gamma, kappa / gamma, gammastar / gamma)
    }

    pub fn validate(&self) -> Result<(), QedError> {
        let check = |name: &str, v: f64, allow_zero: bool| {
            let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
            if ok {
                Ok(())
            } else {
                let bound = if allow_zero { ">= 0" } else { "> 0" };
                Err(QedError::InvalidInput(format!("{name} must be finite and {bound}, got {v}")))
            }
        };
        check("g_over_gamma", self.g_over_gamma, false)?;
        check("kappa_over_gamma", self.kappa_over_gamma, false)?;
        check("gammastar_over_gamma", self.gammastar_over_gamma, true)
    }

    /// Total emitter-coherence decay rate, γ/2 + γ*.
    pub fn emitter_coherence_rate(&self) -> f64 {
        0.5 + self.gammastar_over_gamma
    }

    /// Decay rate of the emitter-cavity coherence, (γ+κ)/2 + γ*.
    pub fn polarization_rate(&self) -> f64 {
        0.5 * (1.0 + self.kappa_over_gamma) + self.gammastar_over_gamma
    }
}

/// Emitter-to-cavity transfer rate R = 4g²/κ in units of γ.
pub fn photon_transfer_rate(rates: &RateSet) -> f64 {
    4.0 * rates.g_over_gamma * rates.g_over_gamma / rates.kappa_over_gamma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingRegime {
    CoherentStrong,
    Incoherent,
}

/// Coherent strong coupling requires g > γ* + γ strictly.
pub fn coupling_regime(rates: &RateSet) -> CouplingRegime {
    if rates.g_over_gamma > rates.gammastar_over_gamma + 1.0 {
        CouplingRegime::CoherentStrong
    } else {
        CouplingRegime::Incoherent
    }
}
