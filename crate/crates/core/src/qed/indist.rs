//! Two-photon indistinguishability
//! I = ∬|G(t,τ)|² dt dτ / ∬ p_c(t) p_c(t+τ) dt dτ.
//!
//! G(t,τ) = φ(τ)·x(t) with φ(τ) the cavity row of the regression propagator
//! and x(t) the regression seed, and p_c(t+τ) = r(τ)·s(t) with r(τ) the
//! cavity row of the population propagator. Each double integral therefore
//! splits into a τ-Gram matrix contracted against t-quadratures.
//!
//! * `Quadrature`: τ-integrals by the same composite Gauss–Legendre rule on
//!   [0, t_max] as the t-integral.
//! * `Eigen`: τ-integrals to infinity in closed form from the eigenvalues,
//!   ∫₀^∞ e^{(λ̄ᵢ+λⱼ)τ} dτ = −1/(λ̄ᵢ+λⱼ); only t is integrated numerically.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dynamics::{CouplingPhase, Dynamics};
use super::linalg::lyapunov;
use super::quadrature::{rule32, Mesh, GL_ORDER};
use super::rates::RateSet;
use super::QedError;

pub const DEFAULT_TOL: f64 = 1e-6;
/// Panel count may grow to 2¹⁰ times the initial mesh.
pub const MAX_DOUBLINGS: u32 = 10;
/// Initial panel width times the fastest live rate.
const INITIAL_RESOLUTION: f64 = 16.0;
const DEGENERATE_DENOMINATOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    Eigen,
}

impl std::str::FromStr for Method {
    type Err = QedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadrature" => Ok(Self::Quadrature),
            "eigen" => Ok(Self::Eigen),
            other => Err(QedError::InvalidInput(format!(
                "unknown method {other:?}, expected \"quadrature\" or \"eigen\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndistResult {
    pub indist: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub method: Method,
    pub t_max: f64,
    /// p_e + p_c left at t_max.
    pub residual: f64,
    pub panels: usize,
    pub dense_fallback: bool,
}

pub fn indistinguishability(rates: &RateSet, method: Method, tol: f64) -> Result<IndistResult, QedError> {
    indistinguishability_with_phase(rates, CouplingPhase::Positive, method, tol)
}

pub fn indistinguishability_with_phase(
    rates: &RateSet,
    phase: CouplingPhase,
    method: Method,
    tol: f64,
) -> Result<IndistResult, QedError> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(QedError::InvalidInput(format!("tol must lie in (0, 1e-3], got {tol}")));
    }
    let dynamics = Dynamics::with_phase(*rates, phase)?;
    let (t_max, residual) = horizon(&dynamics, tol);

    let mut rates_all: Vec<C> = dynamics.population().eigenvalues().to_vec();
    rates_all.extend_from_slice(dynamics.regression().eigenvalues());
    let mut mesh = Mesh::graded(t_max, &rates_all, INITIAL_RESOLUTION);

    let tau_kernels = match method {
        Method::Eigen => Some(closed_form_kernels(&dynamics)?),
        Method::Quadrature => None,
    };
    let evaluate = |mesh: &Mesh| -> (f64, f64) {
        let (gram, pop_row) = match &tau_kernels {
            Some(k) => (k.0, k.1),
            None => quadrature_kernels(&dynamics, mesh),
        };
        contract(&dynamics, mesh, &gram, &pop_row)
    };

    let (mut num, mut den) = evaluate(&mesh);
    let mut converged = false;
    for _ in 0..MAX_DOUBLINGS {
        let finer = mesh.refined();
        let (n2, d2) = evaluate(&finer);
        let change = relative_change(n2 / d2, num / den).max(relative_change(d2, den));
        mesh = finer;
        num = n2;
        den = d2;
        if change < tol {
            converged = true;
            break;
        }
    }

    if !(den >= DEGENERATE_DENOMINATOR) {
        return Err(QedError::DegenerateEmission(format!(
            "denominator {den:e} below {DEGENERATE_DENOMINATOR:e}: the cavity is never populated"
        )));
    }
    let indist = num / den;
    if !indist.is_finite() {
        return Err(QedError::Numerical(format!("non-finite indistinguishability {num}/{den}")));
    }
    if !converged {
        return Err(QedError::ConvergenceFailure { last_estimate: indist, panels: mesh.panels() });
    }
    Ok(IndistResult {
        indist,
        numerator: num,
        denominator: den,
        method,
        t_max,
        residual,
        panels: mesh.panels(),
        dense_fallback: dynamics.dense_fallback(),
    })
}

fn relative_change(new: f64, old: f64) -> f64 {
    let scale = new.abs().max(old.abs());
    if scale == 0.0 {
        0.0
    } else {
        (new - old).abs() / scale
    }
}

/// Smallest horizon (to bisection precision) with p_e + p_c < tol. The sum
/// is non-increasing because its derivative is −p_e − κ p_c.
fn horizon(d: &Dynamics, tol: f64) -> (f64, f64) {
    let residual = |t: f64| {
        let s = d.state(t);
        s[0] + s[1]
    };
    let mut hi = 1.0;
    while residual(hi) >= tol {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < tol {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-6 * hi {
            break;
        }
    }
    (hi, residual(hi))
}

type Gram = [[C; 2]; 2];

/// Panels per parallel work unit. Partial sums are combined in chunk order,
/// so results do not depend on scheduling.
const PANELS_PER_CHUNK: usize = 256;

/// Values of the sampled quantities at the nodes of one panel.
struct Panel {
    weight: [f64; GL_ORDER],
    state: [[f64; 3]; GL_ORDER],
    phi: [[C; 2]; GL_ORDER],
    row: [[f64; 3]; GL_ORDER],
}

/// Evaluates s(t), φ(t) and r(t) panel by panel. On the eigen route the
/// node factors e^{λ·h·xᵢ} are reused while consecutive panels share a width,
/// so a node costs a few complex products instead of exponentials.
struct Sampler<'a> {
    d: &'a Dynamics,
    with_rows: bool,
    half: f64,
    factors: Vec<[C; GL_ORDER]>,
}

impl<'a> Sampler<'a> {
    fn new(d: &'a Dynamics, with_rows: bool) -> Self {
        Self { d, with_rows, half: f64::NAN, factors: Vec::new() }
    }

    fn panel(&mut self, a: f64, b: f64) -> Panel {
        let (x, w) = rule32();
        let mut half = 0.5 * (b - a);
        let Some((state, phi, row)) = self.d.modal() else {
            let mut out = Panel::empty(half, w);
            for i in 0..GL_ORDER {
                let t = a + half * (1.0 + x[i]);
                out.state[i] = self.d.state(t);
                if self.with_rows {
                    out.phi[i] = self.d.regression_row(t);
                    out.row[i] = self.d.cavity_row(t);
                }
            }
            return out;
        };
        let lambdas = state.iter().map(|m| m.0).chain(phi.iter().map(|m| m.0)).chain(row.iter().map(|m| m.0));
        // Widths of consecutive uniform panels differ only by the rounding of
        // their breakpoints; the cached width then defines the panel
        // [a, a + 2·half] for both nodes and weights.
        if (half - self.half).abs() <= 1e-9 * half {
            half = self.half;
        } else {
            self.half = half;
            self.factors =
                lambdas.clone().map(|l| std::array::from_fn(|i| (l * (half * (1.0 + x[i]))).exp())).collect();
        }
        // A mode below e^{-40} at the panel start is dropped; the mesh no
        // longer resolves it and its factors may overflow.
        let base: Vec<Option<C>> = lambdas.map(|l| (l.re * a >= -40.0).then(|| (l * a).exp())).collect();
        let mut out = Panel::empty(half, w);
        let mut k = 0;
        for (_, v) in state {
            if let Some(b) = base[k] {
                for i in 0..GL_ORDER {
                    let f = b * self.factors[k][i];
                    for (o, c) in out.state[i].iter_mut().zip(v) {
                        *o += (f * c).re;
                    }
                }
            }
            k += 1;
        }
        if self.with_rows {
            for (_, v) in phi {
                if let Some(b) = base[k] {
                    for i in 0..GL_ORDER {
                        let f = b * self.factors[k][i];
                        for (o, c) in out.phi[i].iter_mut().zip(v) {
                            *o += f * c;
                        }
                    }
                }
                k += 1;
            }
            for (_, v) in row {
                if let Some(b) = base[k] {
                    for i in 0..GL_ORDER {
                        let f = b * self.factors[k][i];
                        for (o, c) in out.row[i].iter_mut().zip(v) {
                            *o += (f * c).re;
                        }
                    }
                }
                k += 1;
            }
        }
        out
    }
}

impl Panel {
    fn empty(half: f64, w: &[f64]) -> Self {
        Self {
            weight: std::array::from_fn(|i| half * w[i]),
            state: [[0.0; 3]; GL_ORDER],
            phi: [[C::new(0.0, 0.0); 2]; GL_ORDER],
            row: [[0.0; 3]; GL_ORDER],
        }
    }
}

fn chunked_sum<T, F>(d: &Dynamics, mesh: &Mesh, with_rows: bool, zero: T, add: fn(T, T) -> T, f: F) -> T
where
    T: Copy + Send + Sync,
    F: Fn(&Panel) -> T + Sync,
{
    let panels = mesh.panels();
    let chunks = panels.div_ceil(PANELS_PER_CHUNK);
    let parts: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sampler = Sampler::new(d, with_rows);
            let lo = c * PANELS_PER_CHUNK;
            let hi = (lo + PANELS_PER_CHUNK).min(panels);
            (lo..hi).fold(zero, |acc, p| add(acc, f(&sampler.panel(mesh.breaks[p], mesh.breaks[p + 1]))))
        })
        .collect();
    parts.into_iter().fold(zero, add)
}

fn quadrature_kernels(d: &Dynamics, mesh: &Mesh) -> (Gram, [f64; 3]) {
    type Acc = (Gram, [f64; 3]);
    let zero: Acc = ([[C::new(0.0, 0.0); 2]; 2], [0.0; 3]);
    fn add(a: Acc, b: Acc) -> Acc {
        let mut out = a;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += b.0[i][j];
            }
        }
        for k in 0..3 {
            out.1[k] += b.1[k];
        }
        out
    }
    chunked_sum(d, mesh, true, zero, add, |p| {
        let mut acc = zero;
        for i in 0..GL_ORDER {
            let (w, phi) = (p.weight[i], &p.phi[i]);
            for a in 0..2 {
                for b in 0..2 {
                    acc.0[a][b] += w * phi[a].conj() * phi[b];
                }
            }
            for k in 0..3 {
                acc.1[k] += w * p.row[i][k];
            }
        }
        acc
    })
}

/// ∫₀^∞ φ(τ)ᴴφ(τ) dτ and ∫₀^∞ r(τ) dτ.
fn closed_form_kernels(d: &Dynamics) -> Result<(Gram, [f64; 3]), QedError> {
    let gram = match d.regression().row_modes(1) {
        Some(modes) => {
            let mut gram = [[C::new(0.0, 0.0); 2]; 2];
            for (li, bi) in &modes {
                for (lj, bj) in &modes {
                    let integral = -1.0 / (li.conj() + lj);
                    for a in 0..2 {
                        for b in 0..2 {
                            gram[a][b] += bi[a].conj() * bj[b] * integral;
                        }
                    }
                }
            }
            gram
        }
        None => {
            let a = d.regression().generator();
            let mut q = DMatrix::<C>::zeros(2, 2);
            q[(1, 1)] = C::new(1.0, 0.0);
            let x = lyapunov(a, &q).ok_or_else(|| QedError::Numerical("singular Lyapunov system".into()))?;
            [[x[(0, 0)], x[(0, 1)]], [x[(1, 0)], x[(1, 1)]]]
        }
    };
    let row = match d.population().row_modes(1) {
        Some(modes) => {
            let mut row = [0.0; 3];
            for (l, b) in &modes {
                for j in 0..3 {
                    row[j] += (-b[j] / l).re;
                }
            }
            row
        }
        None => {
            // r_∞ solves Mᵀ r = −e_c
            let m = d.population().generator().transpose();
            let rhs = DVector::from_column_slice(&[C::new(0.0, 0.0), C::new(-1.0, 0.0), C::new(0.0, 0.0)]);
            let r = m.lu().solve(&rhs).ok_or_else(|| QedError::Numerical("singular generator".into()))?;
            [r[0].re, r[1].re, r[2].re]
        }
    };
    Ok((gram, row))
}

fn contract(d: &Dynamics, mesh: &Mesh, gram: &Gram, pop_row: &[f64; 3]) -> (f64, f64) {
    fn add(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
        (a.0 + b.0, a.1 + b.1)
    }
    chunked_sum(d, mesh, false, (0.0, 0.0), add, |p| {
        let mut acc = (0.0, 0.0);
        for i in 0..GL_ORDER {
            let state = &p.state[i];
            let x = Dynamics::regression_seed(state);
            let mut q = C::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    q += x[a].conj() * gram[a][b] * x[b];
                }
            }
            let later: f64 = pop_row.iter().zip(state).map(|(r, s)| r * s).sum();
            acc.0 += p.weight[i] * q.re;
            acc.1 += p.weight[i] * state[1] * later;
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(g: f64, k: f64, gs: f64) -> RateSet {
        RateSet::new(g, k, gs).unwrap()
    }

    fn both(r: &RateSet) -> (IndistResult, IndistResult) {
        (
            indistinguishability(r, Method::Quadrature, DEFAULT_TOL).unwrap(),
            indistinguishability(r, Method::Eigen, DEFAULT_TOL).unwrap(),
        )
    }

    #[test]
    fn no_dephasing_gives_unity() {
        let (q, e) = both(&rates(1e3, 1e3, 0.0));
        assert!((q.indist - 1.0).abs() < 1e-3, "{}", q.indist);
        assert!((e.indist - 1.0).abs() < 1e-3, "{}", e.indist);
        assert!(q.residual < DEFAULT_TOL);
    }

    #[test]
    fn bad_cavity_limit_matches_adiabatic_elimination() {
        let r = rates(30.0, 3000.0, 100.0);
        let big_r = 4.0 * 30.0 * 30.0 / 3000.0;
        let oracle = (1.0 + big_r) / (1.0 + big_r + 200.0);
        let (q, e) = both(&r);
        for v in [q.indist, e.indist] {
            assert!((v / oracle - 1.0).abs() < 0.15, "{v} vs {oracle}");
        }
    }

    #[test]
    fn denominator_is_half_the_squared_photon_number() {
        // ∫∫ p_c(t) p_c(t+τ) dτ dt over t+τ ≥ t equals ½(∫p_c)².
        let r = rates(20.0, 150.0, 40.0);
        let e = indistinguishability(&r, Method::Eigen, 1e-8).unwrap();
        let d = Dynamics::new(r).unwrap();
        let mesh = Mesh::graded(e.t_max, d.population().eigenvalues(), 4.0).refined().refined();
        let n: f64 = mesh.nodes().iter().map(|&(t, w)| w * d.state(t)[1]).sum();
        assert!((e.denominator / (0.5 * n * n) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_emission_is_reported() {
        let err = indistinguishability(&rates(1e-12, 10.0, 1.0), Method::Eigen, DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, QedError::DegenerateEmission(_)));
    }

    #[test]
    fn tolerance_outside_range_is_rejected() {
        let r = rates(1.0, 1.0, 1.0);
        assert!(indistinguishability(&r, Method::Eigen, 0.0).is_err());
        assert!(indistinguishability(&r, Method::Eigen, 1e-2).is_err());
    }

    #[test]
    fn defective_point_agrees_across_methods() {
        let r = rates(1.0, 5.0, 0.0);
        let (q, e) = both(&r);
        assert!(e.dense_fallback);
        assert!((q.indist - e.indist).abs() < 1e-6);
        assert!((e.indist - 1.0).abs() < 1e-3);
    }

    #[test]
    fn coupling_phase_cancels() {
        let r = rates(300.0, 2000.0, 150.0);
        for m in [Method::Eigen, Method::Quadrature] {
            let a = indistinguishability_with_phase(&r, CouplingPhase::Positive, m, DEFAULT_TOL).unwrap();
            let b = indistinguishability_with_phase(&r, CouplingPhase::Negative, m, DEFAULT_TOL).unwrap();
            assert!((a.indist - b.indist).abs() < 1e-12);
        }
    }

    #[test]
    fn method_parses_from_text() {
        assert_eq!("eigen".parse::<Method>().unwrap(), Method::Eigen);
        assert_eq!("quadrature".parse::<Method>().unwrap(), Method::Quadrature);
        assert!("rk4".parse::<Method>().is_err());
    }
}
