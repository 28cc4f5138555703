//! Exact propagators e^{Mt} for small constant generators.
//!
//! The default route is an eigendecomposition M = V Λ V⁻¹ with eigenvectors
//! obtained by inverse iteration. When V is ill-conditioned (a defective or
//! nearly defective generator) the propagator switches to scaling-and-squaring
//! on M·t, and says so through [`Propagator::is_dense`].

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64 as C;

/// Eigenvector sets with condition number above this use the dense route.
const MAX_CONDITION: f64 = 1e7;

#[derive(Debug, Clone)]
struct Eigen {
    values: Vec<C>,
    vectors: DMatrix<C>,
    inverse: DMatrix<C>,
}

#[derive(Debug, Clone)]
pub struct Propagator {
    generator: DMatrix<C>,
    values: Vec<C>,
    eigen: Option<Eigen>,
}

impl Propagator {
    pub fn new(generator: DMatrix<C>) -> Self {
        assert!(generator.is_square());
        let values: Vec<C> = Schur::new(generator.clone())
            .eigenvalues()
            .expect("complex Schur form is triangular")
            .iter()
            .copied()
            .collect();
        let eigen = decompose(&generator, &values);
        Self { generator, values, eigen }
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &DMatrix<C> {
        &self.generator
    }

    pub fn eigenvalues(&self) -> &[C] {
        &self.values
    }

    /// True when the eigenvector basis was rejected and e^{Mt} is formed by
    /// scaling-and-squaring instead.
    pub fn is_dense(&self) -> bool {
        self.eigen.is_none()
    }

    pub fn exp(&self, t: f64) -> DMatrix<C> {
        match &self.eigen {
            Some(e) => {
                let mut scaled = e.vectors.clone();
                for (k, lambda) in e.values.iter().enumerate() {
                    let f = (lambda * t).exp();
                    scaled.column_mut(k).iter_mut().for_each(|x| *x *= f);
                }
                scaled * &e.inverse
            }
            None => (&self.generator * C::new(t, 0.0)).exp(),
        }
    }

    pub fn apply(&self, t: f64, v: &DVector<C>) -> DVector<C> {
        match &self.eigen {
            Some(e) => {
                let mut coeff = &e.inverse * v;
                for (c, lambda) in coeff.iter_mut().zip(&e.values) {
                    *c *= (lambda * t).exp();
                }
                &e.vectors * coeff
            }
            None => self.exp(t) * v,
        }
    }

    /// Row `i` of e^{Mt}.
    pub fn row(&self, t: f64, i: usize) -> Vec<C> {
        match &self.eigen {
            Some(e) => {
                let n = self.dim();
                let mut out = vec![C::new(0.0, 0.0); n];
                for (k, lambda) in e.values.iter().enumerate() {
                    let f = e.vectors[(i, k)] * (lambda * t).exp();
                    for (j, o) in out.iter_mut().enumerate() {
                        *o += f * e.inverse[(k, j)];
                    }
                }
                out
            }
            None => self.exp(t).row(i).iter().copied().collect(),
        }
    }

    /// Modal form of row `i`: e_iᵀ e^{Mt} = Σ_k e^{λ_k t} b_k. `None` on the
    /// dense route.
    pub fn row_modes(&self, i: usize) -> Option<Vec<(C, Vec<C>)>> {
        let e = self.eigen.as_ref()?;
        Some(
            e.values
                .iter()
                .enumerate()
                .map(|(k, &lambda)| {
                    let b = e.inverse.row(k).iter().map(|x| e.vectors[(i, k)] * x).collect();
                    (lambda, b)
                })
                .collect(),
        )
    }
}

fn decompose(m: &DMatrix<C>, values: &[C]) -> Option<Eigen> {
    let n = m.nrows();
    let scale = m.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut vectors = DMatrix::<C>::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let v = inverse_iteration(m, lambda, scale)?;
        vectors.set_column(k, &v);
    }
    let residual = (m * &vectors - &vectors * DMatrix::from_diagonal(&DVector::from_column_slice(values))).norm();
    if !(residual <= 1e-10 * scale * vectors.norm()) {
        return None;
    }
    let inverse = vectors.clone().try_inverse()?;
    let condition = vectors.norm() * inverse.norm();
    if !(condition.is_finite() && condition < MAX_CONDITION) {
        return None;
    }
    Some(Eigen { values: values.to_vec(), vectors, inverse })
}

fn inverse_iteration(m: &DMatrix<C>, lambda: C, scale: f64) -> Option<DVector<C>> {
    let n = m.nrows();
    let shift = lambda + C::new(1e-11 * scale, 0.7e-11 * scale);
    let lu = (m - DMatrix::<C>::identity(n, n) * shift).lu();
    let mut v = DVector::from_fn(n, |i, _| C::new(1.0, 0.31 * (i as f64 + 1.0)));
    for _ in 0..3 {
        v = lu.solve(&v)?;
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return None;
        }
        v /= C::new(norm, 0.0);
    }
    Some(v)
}

/// Solves Aᴴ X + X A = −Q for Hermitian X by Kronecker vectorisation. Used
/// for Gram integrals ∫₀^∞ e^{Aᴴτ} Q e^{Aτ} dτ when A is stable.
pub fn lyapunov(a: &DMatrix<C>, q: &DMatrix<C>) -> Option<DMatrix<C>> {
    let n = a.nrows();
    let ah = a.adjoint();
    let mut k = DMatrix::<C>::zeros(n * n, n * n);
    // vec(X) index is r + n·c; (AᴴX)_rc = Σ_s Aᴴ_rs X_sc; (XA)_rc = Σ_s X_rs A_sc.
    for c in 0..n {
        for r in 0..n {
            let row = r + n * c;
            for s in 0..n {
                k[(row, s + n * c)] += ah[(r, s)];
                k[(row, r + n * s)] += a[(s, c)];
            }
        }
    }
    let rhs = DVector::from_fn(n * n, |idx, _| -q[(idx % n, idx / n)]);
    let x = k.lu().solve(&rhs)?;
    Some(DMatrix::from_fn(n, n, |r, c| x[r + n * c]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> DMatrix<C> {
        let n = rows.len();
        DMatrix::from_fn(n, n, |i, j| C::new(rows[i][j], 0.0))
    }

    #[test]
    fn eigen_route_matches_scaling_and_squaring() {
        let m = real(&[&[-1.0, 0.0, 2.0], &[0.0, -3.0, -2.0], &[-0.5, 0.5, -2.0]]);
        let p = Propagator::new(m.clone());
        assert!(!p.is_dense());
        for t in [0.0, 0.1, 1.3, 4.0] {
            let dense = (&m * C::new(t, 0.0)).exp();
            assert!((p.exp(t) - dense).norm() < 1e-12);
        }
    }

    #[test]
    fn defective_generator_falls_back_to_dense() {
        let m = real(&[&[-1.0, 1.0], &[0.0, -1.0]]);
        let p = Propagator::new(m);
        assert!(p.is_dense());
        let e = p.exp(2.0);
        let d = (-2.0f64).exp();
        assert!((e[(0, 0)].re - d).abs() < 1e-14);
        assert!((e[(0, 1)].re - 2.0 * d).abs() < 1e-14);
    }

    #[test]
    fn rows_and_modes_agree_with_full_exponential() {
        let m = DMatrix::from_row_slice(2, 2, &[C::new(-0.7, 0.0), C::new(0.0, -3.0), C::new(0.0, -3.0), C::new(-2.0, 0.0)]);
        let p = Propagator::new(m);
        let t = 0.37;
        let full = p.exp(t);
        let row = p.row(t, 1);
        let modes = p.row_modes(1).unwrap();
        for j in 0..2 {
            assert!((row[j] - full[(1, j)]).norm() < 1e-14);
            let from_modes: C = modes.iter().map(|(l, b)| (l * t).exp() * b[j]).sum();
            assert!((from_modes - full[(1, j)]).norm() < 1e-13);
        }
    }

    #[test]
    fn lyapunov_matches_gram_integral() {
        let a = DMatrix::from_row_slice(2, 2, &[C::new(-1.0, 0.0), C::new(0.0, 0.5), C::new(0.0, 0.5), C::new(-2.0, 0.0)]);
        let q = DMatrix::from_row_slice(2, 2, &[C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)]);
        let x = lyapunov(&a, &q).unwrap();
        // crude midpoint integral
        let p = Propagator::new(a.clone());
        let h = 1e-3;
        let mut acc = DMatrix::<C>::zeros(2, 2);
        for k in 0..40_000 {
            let e = p.exp((k as f64 + 0.5) * h);
            acc += e.adjoint() * &q * e * C::new(h, 0.0);
        }
        assert!((acc - &x).norm() < 1e-6);
    }
}
