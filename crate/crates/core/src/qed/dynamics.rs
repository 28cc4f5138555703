//! Single-excitation emitter-cavity dynamics and two-time correlations.
//!
//! With one excitation and no drive the density matrix lives on
//! {|e0⟩, |g1⟩, |g0⟩}. Writing p_e = ρ_{e0,e0}, p_c = ρ_{g1,g1} and
//! c = ρ_{e0,g1} = u + iv (γ = 1, Γ = (1+κ)/2 + γ*):
//!
//! ```text
//! ṗ_e = −p_e + 2g·v
//! ṗ_c = −κ·p_c − 2g·v
//! u̇   = −Γ·u
//! v̇   = −Γ·v − g·(p_e − p_c)
//! ```
//!
//! u starts at zero and never couples back, so the propagator works on the
//! (p_e, p_c, v) block. The regression system for ⟨a†(t+τ)a(t)⟩ acts on
//! x = (x_e, x_c) with x(0) = (conj c(t), p_c(t)):
//!
//! ```text
//! ẋ_e = −(1/2 + γ*)·x_e − i·g·x_c
//! ẋ_c = −(κ/2)·x_c − i·g·x_e
//! ```
//!
//! Both use the same coupling sign, so the coherence built up by the
//! population dynamics feeds the correlation with the right phase.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::linalg::Propagator;
use super::rates::RateSet;
use super::QedError;

const I: C = C { re: 0.0, im: 1.0 };

/// Sign convention of the coupling term. Physical results do not depend on
/// it; it exists so that this can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingPhase {
    #[default]
    Positive,
    Negative,
}

impl CouplingPhase {
    fn sign(self) -> f64 {
        match self {
            Self::Positive => 1.0,
            Self::Negative => -1.0,
        }
    }
}

/// The 4×4 real generator on (p_e, p_c, Re c, Im c).
pub fn population_generator(rates: &RateSet) -> DMatrix<f64> {
    let g = rates.g_over_gamma;
    let k = rates.kappa_over_gamma;
    let big = rates.polarization_rate();
    DMatrix::from_row_slice(
        4,
        4,
        &[
            -1.0, 0.0, 0.0, 2.0 * g, //
            0.0, -k, 0.0, -2.0 * g, //
            0.0, 0.0, -big, 0.0, //
            -g, g, 0.0, -big,
        ],
    )
}

/// Precomputed propagators for one rate set.
#[derive(Debug, Clone)]
pub struct Dynamics {
    rates: RateSet,
    population: Propagator,
    regression: Propagator,
    /// p_g(t) = yᵀ(s(t) − s(0)) with Mᵀy = (1, κ, 0).
    ground_weights: [f64; 3],
    modes: Option<Modes>,
}

/// Modal expansions Σ_k e^{λ_k t}·v_k of the quantities sampled in the
/// quadratures, avoiding a matrix product per time point.
#[derive(Debug, Clone)]
struct Modes {
    state: Vec<(C, [C; 3])>,
    cavity_row: Vec<(C, [C; 3])>,
    phi: Vec<(C, [C; 2])>,
}

fn expand<const N: usize>(modes: &[(C, [C; N])], t: f64) -> [C; N] {
    let mut out = [C::new(0.0, 0.0); N];
    for (lambda, v) in modes {
        let f = (lambda * t).exp();
        for (o, x) in out.iter_mut().zip(v) {
            *o += f * x;
        }
    }
    out
}

impl Dynamics {
    pub fn new(rates: RateSet) -> Result<Self, QedError> {
        Self::with_phase(rates, CouplingPhase::Positive)
    }

    pub fn with_phase(rates: RateSet, phase: CouplingPhase) -> Result<Self, QedError> {
        rates.validate()?;
        let g = phase.sign() * rates.g_over_gamma;
        let k = rates.kappa_over_gamma;
        let big = rates.polarization_rate();
        let block = DMatrix::from_row_slice(3, 3, &[-1.0, 0.0, 2.0 * g, 0.0, -k, -2.0 * g, -g, g, -big]);
        let tau = DMatrix::from_row_slice(
            2,
            2,
            &[C::new(-rates.emitter_coherence_rate(), 0.0), -I * g, -I * g, C::new(-0.5 * k, 0.0)],
        );
        let w = nalgebra::Vector3::new(1.0, k, 0.0);
        let y = block
            .transpose()
            .lu()
            .solve(&DVector::from_column_slice(w.as_slice()))
            .ok_or_else(|| QedError::Numerical("singular population generator".into()))?;
        let population = Propagator::new(block.map(|x| C::new(x, 0.0)));
        let regression = Propagator::new(tau);
        let modes = match (population.row_modes(1), regression.row_modes(1)) {
            (Some(cavity_row), Some(phi)) => {
                // s(t) = Σ_k e^{λ_k t} V_k (V⁻¹ s₀)_k, i.e. column 0 of e^{Mt}.
                let rows: Vec<Vec<(C, Vec<C>)>> =
                    (0..3).map(|i| population.row_modes(i).expect("eigen route")).collect();
                let state = (0..3)
                    .map(|k| (rows[0][k].0, [rows[0][k].1[0], rows[1][k].1[0], rows[2][k].1[0]]))
                    .collect();
                Some(Modes {
                    state,
                    cavity_row: cavity_row.into_iter().map(|(l, b)| (l, [b[0], b[1], b[2]])).collect(),
                    phi: phi.into_iter().map(|(l, b)| (l, [b[0], b[1]])).collect(),
                })
            }
            _ => None,
        };
        Ok(Self { rates, population, regression, ground_weights: [y[0], y[1], y[2]], modes })
    }

    pub fn rates(&self) -> &RateSet {
        &self.rates
    }

    pub fn population(&self) -> &Propagator {
        &self.population
    }

    pub fn regression(&self) -> &Propagator {
        &self.regression
    }

    /// Modal expansions of (state, regression row, cavity row), when the
    /// eigen route is in use.
    #[allow(clippy::type_complexity)]
    pub(crate) fn modal(&self) -> Option<(&[(C, [C; 3])], &[(C, [C; 2])], &[(C, [C; 3])])> {
        self.modes.as_ref().map(|m| (m.state.as_slice(), m.phi.as_slice(), m.cavity_row.as_slice()))
    }

    /// True when either propagator had to use the dense exponential.
    pub fn dense_fallback(&self) -> bool {
        self.population.is_dense() || self.regression.is_dense()
    }

    /// (p_e, p_c, Im c) at time t from the excited initial state.
    pub fn state(&self, t: f64) -> [f64; 3] {
        if let Some(m) = &self.modes {
            let s = expand(&m.state, t);
            return [s[0].re, s[1].re, s[2].re];
        }
        let s0 = DVector::from_column_slice(&[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]);
        let s = self.population.apply(t, &s0);
        [s[0].re, s[1].re, s[2].re]
    }

    pub fn ground_population(&self, state: &[f64; 3]) -> f64 {
        let y = &self.ground_weights;
        y[0] * (state[0] - 1.0) + y[1] * state[1] + y[2] * state[2]
    }

    /// Regression initial vector (conj c, p_c) for a population state.
    pub fn regression_seed(state: &[f64; 3]) -> [C; 2] {
        [C::new(0.0, -state[2]), C::new(state[1], 0.0)]
    }

    /// Cavity row of the regression propagator, φ(τ) = e_cᵀ e^{Aτ}.
    pub fn regression_row(&self, tau: f64) -> [C; 2] {
        match &self.modes {
            Some(m) => expand(&m.phi, tau),
            None => {
                let r = self.regression.row(tau, 1);
                [r[0], r[1]]
            }
        }
    }

    /// Cavity row of the population propagator: p_c(t+τ) = r(τ)·s(t).
    pub fn cavity_row(&self, tau: f64) -> [f64; 3] {
        match &self.modes {
            Some(m) => expand(&m.cavity_row, tau).map(|x| x.re),
            None => {
                let r = self.population.row(tau, 1);
                [r[0].re, r[1].re, r[2].re]
            }
        }
    }

    /// G(t, τ) = ⟨a†(t+τ) a(t)⟩.
    pub fn correlation(&self, t: f64, tau: f64) -> C {
        let x = Self::regression_seed(&self.state(t));
        let phi = self.regression_row(tau);
        phi[0] * x[0] + phi[1] * x[1]
    }

    pub fn trajectory(&self, horizon: f64, n_steps: usize) -> Result<PopulationTrajectory, QedError> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(QedError::InvalidInput(format!("horizon must be positive, got {horizon}")));
        }
        if n_steps < 2 {
            return Err(QedError::InvalidInput(format!("n_steps must be >= 2, got {n_steps}")));
        }
        let mut out = PopulationTrajectory {
            times: Vec::with_capacity(n_steps),
            p_e: Vec::with_capacity(n_steps),
            p_c: Vec::with_capacity(n_steps),
            coh: Vec::with_capacity(n_steps),
            p_g: Vec::with_capacity(n_steps),
            dense_fallback: self.population.is_dense(),
        };
        for k in 0..n_steps {
            let t = horizon * k as f64 / (n_steps - 1) as f64;
            let s = self.state(t);
            out.times.push(t);
            out.p_e.push(s[0]);
            out.p_c.push(s[1]);
            out.coh.push(C::new(0.0, s[2]));
            out.p_g.push(self.ground_population(&s));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationTrajectory {
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    pub p_c: Vec<f64>,
    pub coh: Vec<C>,
    pub p_g: Vec<f64>,
    /// The eigenbasis was rejected and the dense exponential was used.
    pub dense_fallback: bool,
}

pub fn single_excitation_trajectory(
    rates: &RateSet,
    horizon: f64,
    n_steps: usize,
) -> Result<PopulationTrajectory, QedError> {
    Dynamics::new(*rates)?.trajectory(horizon, n_steps)
}

pub fn two_time_correlation(rates: &RateSet, t: f64, tau: f64) -> Result<C, QedError> {
    if !(t.is_finite() && t >= 0.0 && tau.is_finite() && tau >= 0.0) {
        return Err(QedError::InvalidInput(format!("t and tau must be >= 0, got t={t}, tau={tau}")));
    }
    Ok(Dynamics::new(*rates)?.correlation(t, tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(g: f64, k: f64, gs: f64) -> RateSet {
        RateSet::new(g, k, gs).unwrap()
    }

    /// Fixed-step RK4 on the full complex equations, written out directly.
    fn rk4_correlation(r: &RateSet, t: f64, tau: f64, h: f64) -> C {
        let (g, k, gs) = (r.g_over_gamma, r.kappa_over_gamma, r.gammastar_over_gamma);
        let big = 0.5 * (1.0 + k) + gs;
        let f = |y: &[C; 3]| {
            let [pe, pc, c] = *y;
            [
                -pe + 2.0 * g * c.im,
                -k * pc - 2.0 * g * c.im,
                -big * c - I * g * (pe - pc),
            ]
        };
        let mut y = [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)];
        let steps = (t / h).round() as usize;
        let hh = t / steps.max(1) as f64;
        for _ in 0..steps {
            let k1 = f(&y);
            let y2: [C; 3] = std::array::from_fn(|i| y[i] + 0.5 * hh * k1[i]);
            let k2 = f(&y2);
            let y3: [C; 3] = std::array::from_fn(|i| y[i] + 0.5 * hh * k2[i]);
            let k3 = f(&y3);
            let y4: [C; 3] = std::array::from_fn(|i| y[i] + hh * k3[i]);
            let k4 = f(&y4);
            for i in 0..3 {
                y[i] += hh / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        let fx = |x: &[C; 2]| [-(0.5 + gs) * x[0] - I * g * x[1], -0.5 * k * x[1] - I * g * x[0]];
        let mut x = [y[2].conj(), y[1]];
        let steps = (tau / h).round() as usize;
        let hh = tau / steps.max(1) as f64;
        for _ in 0..steps {
            let k1 = fx(&x);
            let x2: [C; 2] = std::array::from_fn(|i| x[i] + 0.5 * hh * k1[i]);
            let k2 = fx(&x2);
            let x3: [C; 2] = std::array::from_fn(|i| x[i] + 0.5 * hh * k2[i]);
            let k3 = fx(&x3);
            let x4: [C; 2] = std::array::from_fn(|i| x[i] + hh * k3[i]);
            let k4 = fx(&x4);
            for i in 0..2 {
                x[i] += hh / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        x[1]
    }

    #[test]
    fn rabi_oscillation_without_loss() {
        // With γ as the unit, the lossless limit is g ≫ κ, γ*, γ and times of
        // a few g⁻¹.
        let g = 1e12;
        let r = rates(g, 1.0, 1.0);
        let traj = single_excitation_trajectory(&r, 10.0 / g, 101).unwrap();
        for (t, pe) in traj.times.iter().zip(&traj.p_e) {
            let expected = (g * t).cos().powi(2);
            assert!((pe - expected).abs() < 1e-6, "t={t}: {pe} vs {expected}");
        }
    }

    #[test]
    fn uncoupled_emitter_decays_radiatively() {
        let r = rates(1e-12, 10.0, 0.0);
        let traj = single_excitation_trajectory(&r, 5.0, 51).unwrap();
        for k in 0..traj.times.len() {
            assert!((traj.p_e[k] - (-traj.times[k]).exp()).abs() < 1e-9);
            assert!(traj.p_c[k].abs() < 1e-9);
        }
    }

    #[test]
    fn trace_is_conserved() {
        for r in [rates(10.0, 100.0, 0.0), rates(300.0, 20.0, 50.0), rates(1.0, 1.0, 0.0), rates(2e4, 3e4, 1e4)] {
            let traj = single_excitation_trajectory(&r, 3.0, 301).unwrap();
            for k in 0..traj.times.len() {
                let total = traj.p_e[k] + traj.p_c[k] + traj.p_g[k];
                assert!((total - 1.0).abs() < 1e-6, "{r:?} t={}: {total}", traj.times[k]);
                for p in [traj.p_e[k], traj.p_c[k], traj.p_g[k]] {
                    assert!((-1e-9..=1.0 + 1e-9).contains(&p));
                }
                assert!(traj.coh[k].norm_sqr() <= traj.p_e[k] * traj.p_c[k] + 1e-9);
            }
        }
    }

    #[test]
    fn full_generator_matches_the_block() {
        let r = rates(7.0, 40.0, 3.0);
        let m = population_generator(&r);
        let e = m.exp();
        let s = Dynamics::new(r).unwrap().state(1.0);
        assert!((e[(0, 0)] - s[0]).abs() < 1e-12);
        assert!((e[(1, 0)] - s[1]).abs() < 1e-12);
        assert!(e[(2, 0)].abs() < 1e-15);
        assert!((e[(3, 0)] - s[2]).abs() < 1e-12);
    }

    #[test]
    fn zero_delay_correlation_is_the_cavity_population() {
        let r = rates(30.0, 200.0, 80.0);
        let d = Dynamics::new(r).unwrap();
        for t in [0.0, 0.01, 0.3, 2.0] {
            let g = d.correlation(t, 0.0);
            assert!((g.re - d.state(t)[1]).abs() < 1e-12);
            assert!(g.im.abs() < 1e-12);
        }
    }

    #[test]
    fn uncoupled_cavity_has_no_correlation() {
        let r = rates(1e-12, 5.0, 2.0);
        for (t, tau) in [(0.1, 0.0), (1.0, 1.0), (3.0, 0.2)] {
            assert!(two_time_correlation(&r, t, tau).unwrap().norm() < 1e-20);
        }
    }

    #[test]
    fn correlation_matches_brute_force_integration() {
        let r = rates(10.0, 100.0, 0.0);
        for (t, tau) in [(0.05, 0.02), (0.2, 0.1), (0.5, 0.03), (1.0, 0.25)] {
            let exact = two_time_correlation(&r, t, tau).unwrap();
            let brute = rk4_correlation(&r, t, tau, 1e-4);
            assert!((exact - brute).norm() < 1e-5, "({t},{tau}): {exact} vs {brute}");
        }
    }

    #[test]
    fn negative_times_are_rejected() {
        let r = rates(1.0, 1.0, 1.0);
        assert!(two_time_correlation(&r, -1.0, 0.0).is_err());
        assert!(two_time_correlation(&r, 0.0, -1e-3).is_err());
        assert!(single_excitation_trajectory(&r, 1.0, 1).is_err());
        assert!(single_excitation_trajectory(&r, 0.0, 10).is_err());
    }

    #[test]
    fn defective_point_uses_dense_route() {
        // τ-generator is defective when (κ/2 − 1/2 − γ*)² = 4g².
        let r = rates(1.0, 5.0, 0.0);
        let d = Dynamics::new(r).unwrap();
        assert!(d.regression().is_dense());
        assert!((d.correlation(0.4, 0.0).re - d.state(0.4)[1]).abs() < 1e-12);
    }
}
