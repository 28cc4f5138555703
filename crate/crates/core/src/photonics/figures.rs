//! Cavity figures of merit from Q, V_eff and the emitter.

use std::f64::consts::PI;

use super::geometry::EmitterSpec;
use super::PhotonicsError;

pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Angular frequency in rad/s of light at `wavelength_nm`.
pub fn angular_frequency(wavelength_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

/// Mode volume in m³ from its value in units of (λ₀/2n)³.
pub fn veff_m3(veff_norm: f64, lambda0_nm: f64, n: f64) -> f64 {
    veff_norm * (lambda0_nm * 1e-9 / (2.0 * n)).powi(3)
}

/// Transition dipole μ = sqrt(3ħe²f / (2 m ω)) in C·m.
pub fn dipole_moment(emitter: &EmitterSpec) -> f64 {
    let m = emitter.effective_mass * ELECTRON_MASS;
    let omega = angular_frequency(emitter.wavelength_nm);
    (3.0 * HBAR * ELECTRON_CHARGE.powi(2) * emitter.oscillator_strength / (2.0 * m * omega)).sqrt()
}

/// g/γ for an emitter at the field maximum of a mode of volume
/// `veff_norm`·(λ₀/2n)³.
///
/// g = (μ/ħ)·sqrt(ħω / (2 ε₀ ε_M V)), with the emitter's own ω in both μ and
/// the field amplitude.
pub fn coupling_g(emitter: &EmitterSpec, veff_norm: f64, lambda0_nm: f64, n: f64) -> Result<f64, PhotonicsError> {
    emitter.validate()?;
    if !(veff_norm.is_finite() && veff_norm > 0.0) {
        return Err(PhotonicsError::NumericalFailure(format!("mode volume must be positive, got {veff_norm}")));
    }
    let v = veff_m3(veff_norm, lambda0_nm, n);
    let omega = angular_frequency(emitter.wavelength_nm);
    let field = (HBAR * omega / (2.0 * VACUUM_PERMITTIVITY * emitter.epsilon_source * v)).sqrt();
    let g = dipole_moment(emitter) / HBAR * field;
    Ok(g / emitter.radiative_rate_hz)
}

/// κ/γ with κ = ω₀ / 2Q.
pub fn cavity_kappa(lambda0_nm: f64, q: f64, emitter: &EmitterSpec) -> Result<f64, PhotonicsError> {
    if !(q > 0.0) {
        return Err(PhotonicsError::NumericalFailure(format!("quality factor must be positive, got {q}")));
    }
    Ok(angular_frequency(lambda0_nm) / (2.0 * q) / emitter.radiative_rate_hz)
}

/// F = (3 / 4π²)·((λ/n)³ / V)·Q, which is 6Q / (π²·veff_norm).
pub fn purcell_factor(q: f64, veff_norm: f64) -> f64 {
    6.0 * q / (PI * PI * veff_norm)
}

/// Fraction of cavity decay that leaves through the ports,
/// β = 1 − q_total / q_loss. `None` means no intrinsic loss.
pub fn beta_factor(q_total: f64, q_loss: Option<f64>) -> Result<f64, PhotonicsError> {
    match q_loss {
        None => Ok(1.0),
        Some(ql) if ql >= q_total => Ok(1.0 - q_total / ql),
        Some(ql) => Err(PhotonicsError::InconsistentLoss(format!(
            "intrinsic q_loss {ql} below total quality factor {q_total}"
        ))),
    }
}

/// Loaded quality factor when port leakage and intrinsic loss act in
/// parallel: 1/Q = 1/Q_ports + 1/Q_loss.
pub fn loaded_q(q_ports: f64, q_loss: Option<f64>) -> f64 {
    match q_loss {
        None => q_ports,
        Some(ql) => 1.0 / (1.0 / q_ports + 1.0 / ql),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingaas() -> EmitterSpec {
        EmitterSpec::preset("ingaas").unwrap()
    }

    #[test]
    fn coupling_scales_with_inverse_root_volume() {
        let e = ingaas();
        let g1 = coupling_g(&e, 4e-3, 915.0, 2.0).unwrap();
        let g2 = coupling_g(&e, 1e-3, 915.0, 2.0).unwrap();
        assert!((g2 / g1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coupling_scales_with_root_oscillator_strength() {
        let mut e = ingaas();
        let g1 = coupling_g(&e, 1e-3, 915.0, 2.0).unwrap();
        e.oscillator_strength *= 4.0;
        let g2 = coupling_g(&e, 1e-3, 915.0, 2.0).unwrap();
        assert!((g2 / g1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coupling_matches_frequency_free_form() {
        // ω cancels: g = e·sqrt(3 f / (4 m ε₀ ε_M V)).
        let e = ingaas();
        let v = (915e-9f64 / 4.0).powi(3) * 1e-3;
        let hand = 1.602_176_634e-19 * (3.0 * 5.0 / (4.0 * 9.109_383_701_5e-31 * 8.854_187_812_8e-12 * v)).sqrt();
        let g = coupling_g(&e, 1e-3, 915.0, 2.0).unwrap() * 1e9;
        assert!((g / hand - 1.0).abs() < 1e-12);
        // Frozen: 3.158e13 s⁻¹ for these inputs.
        assert!((g / 3.1577e13 - 1.0).abs() < 1e-3, "{g:e}");
    }

    #[test]
    fn kappa_arithmetic() {
        let e = EmitterSpec::preset("rt801").unwrap();
        let k50 = cavity_kappa(801.0, 50.0, &e).unwrap();
        let hand = 2.0 * PI * 2.997_924_58e8 / 801e-9 / 100.0 / 1e9;
        assert!((k50 / hand - 1.0).abs() < 1e-12);
        assert!((k50 / 23_516.0 - 1.0).abs() < 1e-4, "{k50}");
        let k100 = cavity_kappa(801.0, 100.0, &e).unwrap();
        assert!((k50 / k100 - 2.0).abs() < 1e-12);
        let mut prev = k50;
        for q in [1e3, 1e5, 1e8, 1e12] {
            let k = cavity_kappa(801.0, q, &e).unwrap();
            assert!(k < prev);
            prev = k;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn purcell_and_beta_arithmetic() {
        assert!((purcell_factor(1.0, 1.0) - 6.0 / (PI * PI)).abs() < 1e-15);
        assert_eq!(beta_factor(500.0, None).unwrap(), 1.0);
        assert!((beta_factor(500.0, Some(1000.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(beta_factor(500.0, Some(100.0)), Err(PhotonicsError::InconsistentLoss(_))));
    }

    #[test]
    fn loaded_q_combines_in_parallel() {
        assert_eq!(loaded_q(300.0, None), 300.0);
        let q = loaded_q(1e5, Some(1e5));
        assert!((q - 5e4).abs() < 1e-9);
        assert!((beta_factor(q, Some(1e5)).unwrap() - 0.5).abs() < 1e-12);
    }
}
