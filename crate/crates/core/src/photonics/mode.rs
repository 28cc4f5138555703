//! Longitudinal field profile and effective mode volume.

use serde::{Deserialize, Serialize};

use super::geometry::IndexModel;
use super::stack::Stack;
use super::tmm::{layer_amplitudes, wavenumber};
use super::PhotonicsError;

/// Sampling pitch used inside each layer.
const MAX_SAMPLE_PITCH_NM: f64 = 0.5;
const MIN_SAMPLES_PER_LAYER: usize = 16;

/// Samples of ε(z)|E(z)|² across the finite stack, z measured from the
/// input facet. Interfaces appear twice, once with each layer's ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    pub z_nm: Vec<f64>,
    pub energy_density: Vec<f64>,
}

impl FieldProfile {
    pub fn length_nm(&self) -> f64 {
        match (self.z_nm.first(), self.z_nm.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// ∫ ε|E|² dz by the trapezoid rule.
    pub fn integral(&self) -> f64 {
        self.z_nm
            .windows(2)
            .zip(self.energy_density.windows(2))
            .map(|(z, e)| 0.5 * (z[1] - z[0]) * (e[0] + e[1]))
            .sum()
    }

    pub fn peak(&self) -> f64 {
        self.energy_density.iter().copied().fold(0.0, f64::max)
    }
}

pub fn field_profile(stack: &Stack, lambda0_nm: f64) -> FieldProfile {
    let k0 = wavenumber(lambda0_nm);
    let amps = layer_amplitudes(stack, lambda0_nm);
    let mut z_nm = Vec::new();
    let mut energy_density = Vec::new();
    let mut z0 = 0.0;
    for (layer, [a, b]) in stack.layers.iter().zip(amps) {
        let samples = ((layer.thickness_nm / MAX_SAMPLE_PITCH_NM).ceil() as usize).max(MIN_SAMPLES_PER_LAYER);
        let eps = layer.index.re * layer.index.re;
        let kn = layer.index * k0;
        for j in 0..=samples {
            let dz = layer.thickness_nm * j as f64 / samples as f64;
            let phase = num_complex::Complex64::new(0.0, dz) * kn;
            let e = a * phase.exp() + b * (-phase).exp();
            z_nm.push(z0 + dz);
            energy_density.push(eps * e.norm_sqr());
        }
        z0 += layer.thickness_nm;
    }
    FieldProfile { z_nm, energy_density }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeVolume {
    /// ∫ε|E|²dz / max(ε|E|²).
    pub length_nm: f64,
    pub area_nm2: f64,
    pub veff_nm3: f64,
    /// V_eff in units of (λ₀ / 2n)³, n = `n_slot_mode`.
    pub veff_norm: f64,
}

/// V_eff = A(ω_s)·∫ε|E|²dz / max ε|E|².
pub fn mode_volume(
    profile: &FieldProfile,
    model: &IndexModel,
    slot_width_nm: f64,
    lambda0_nm: f64,
) -> Result<ModeVolume, PhotonicsError> {
    let peak = profile.peak();
    let integral = profile.integral();
    if !(peak > 1e-300) || !integral.is_finite() {
        return Err(PhotonicsError::NumericalFailure(format!(
            "degenerate field profile (peak {peak:e})"
        )));
    }
    let length_nm = integral / peak;
    let area_nm2 = model.effective_area_nm2(slot_width_nm);
    let veff_nm3 = area_nm2 * length_nm;
    let unit = (lambda0_nm / (2.0 * model.n_slot_mode)).powi(3);
    Ok(ModeVolume { length_nm, area_nm2, veff_nm3, veff_norm: veff_nm3 / unit })
}
