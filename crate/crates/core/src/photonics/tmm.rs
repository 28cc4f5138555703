//! Normal-incidence transfer matrices.
//!
//! Field amplitudes are `(A, B)` for the forward and backward waves at the
//! left edge of each region. The assembled matrix maps the input half-space
//! amplitudes onto the output half-space amplitudes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stack::Stack;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl TransferMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { m: [[one, zero], [zero, one]] }
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &TransferMatrix) -> Self {
        let a = &self.m;
        let b = &first.m;
        Self {
            m: [
                [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
            ],
        }
    }

    /// Interface from index `from` into index `to`.
    pub fn interface(from: Complex64, to: Complex64) -> Self {
        let ratio = from / to;
        let p = 0.5 * (1.0 + ratio);
        let q = 0.5 * (1.0 - ratio);
        Self { m: [[p, q], [q, p]] }
    }

    /// Propagation over `thickness_nm` of index `n` at free-space wavenumber `k0`.
    pub fn propagation(n: Complex64, thickness_nm: f64, k0: f64) -> Self {
        let phase = Complex64::new(0.0, k0 * thickness_nm) * n;
        let zero = Complex64::new(0.0, 0.0);
        Self { m: [[phase.exp(), zero], [zero, (-phase).exp()]] }
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Reflection and transmission amplitudes for a wave incident from the
    /// input side with nothing incident from the output side.
    pub fn coefficients(&self) -> (Complex64, Complex64) {
        let r = -self.m[1][0] / self.m[1][1];
        let t = self.m[0][0] + self.m[0][1] * r;
        (r, t)
    }
}

pub fn wavenumber(wavelength_nm: f64) -> f64 {
    2.0 * PI / wavelength_nm
}

/// Full-stack transfer matrix at one wavelength.
pub fn transfer_matrix(stack: &Stack, wavelength_nm: f64) -> TransferMatrix {
    let k0 = wavenumber(wavelength_nm);
    let mut total = TransferMatrix::identity();
    let mut prev = Complex64::new(stack.input_index, 0.0);
    for layer in &stack.layers {
        total = TransferMatrix::interface(prev, layer.index).after(&total);
        total = TransferMatrix::propagation(layer.index, layer.thickness_nm, k0).after(&total);
        prev = layer.index;
    }
    TransferMatrix::interface(prev, Complex64::new(stack.output_index, 0.0)).after(&total)
}

/// Power transmission and reflection `(T, R)`.
pub fn transmission_reflection(stack: &Stack, wavelength_nm: f64) -> (f64, f64) {
    let (r, t) = transfer_matrix(stack, wavelength_nm).coefficients();
    (t.norm_sqr() * stack.output_index / stack.input_index, r.norm_sqr())
}

pub fn transmission(stack: &Stack, wavelength_nm: f64) -> f64 {
    transmission_reflection(stack, wavelength_nm).0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub wavelengths_nm: Vec<f64>,
    pub transmission: Vec<f64>,
    pub reflection: Vec<f64>,
}

/// Samples `n_points` wavelengths uniformly over `[lo, hi]`.
pub fn transmission_spectrum(stack: &Stack, range_nm: (f64, f64), n_points: usize) -> Spectrum {
    assert!(n_points >= 2, "a spectrum needs at least two points");
    let (lo, hi) = range_nm;
    assert!(lo > 0.0 && hi > lo, "wavelength range must be positive and increasing");
    let step = (hi - lo) / (n_points - 1) as f64;
    let wavelengths_nm: Vec<f64> = (0..n_points).map(|i| lo + step * i as f64).collect();
    let (transmission, reflection): (Vec<f64>, Vec<f64>) = wavelengths_nm
        .par_iter()
        .map(|&l| transmission_reflection(stack, l))
        .unzip();
    Spectrum { wavelengths_nm, transmission, reflection }
}

/// Forward/backward amplitudes at the left edge of every layer, for unit
/// incidence from the input side.
pub fn layer_amplitudes(stack: &Stack, wavelength_nm: f64) -> Vec<[Complex64; 2]> {
    let k0 = wavenumber(wavelength_nm);
    let (r, _) = transfer_matrix(stack, wavelength_nm).coefficients();
    let mut v = [Complex64::new(1.0, 0.0), r];
    let mut prev = Complex64::new(stack.input_index, 0.0);
    let mut out = Vec::with_capacity(stack.layers.len());
    for layer in &stack.layers {
        v = TransferMatrix::interface(prev, layer.index).apply(v);
        out.push(v);
        v = TransferMatrix::propagation(layer.index, layer.thickness_nm, k0).apply(v);
        prev = layer.index;
    }
    out
}
