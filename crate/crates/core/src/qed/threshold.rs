//! Minimum coupling for a target indistinguishability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::indist::{indistinguishability, Method, DEFAULT_TOL};
use super::rates::RateSet;
use super::QedError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBounds {
    pub g: (f64, f64),
    pub kappa: (f64, f64),
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self { g: (1.0, 1e7), kappa: (1.0, 1e8) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub g_min: f64,
    pub kappa_best: f64,
    /// I at (g_min, kappa_best).
    pub indist: f64,
    /// Best I found at g_min / 1.05.
    pub indist_below: f64,
    /// γ* = 0: every coupling reaches the target.
    pub trivially_satisfied: bool,
}

const COARSE_KAPPA_POINTS: usize = 33;
/// Outer bisection stops once hi/lo is below this.
const G_RATIO: f64 = 1.01;
const BELOW_FACTOR: f64 = 1.05;

/// Best I over log κ at fixed g: coarse scan, then golden section around the
/// best coarse point.
pub fn best_over_kappa(g: f64, gammastar: f64, kappa: (f64, f64), method: Method) -> (f64, f64) {
    let eval = |ln_k: f64| -> f64 {
        RateSet::new(g, ln_k.exp(), gammastar)
            .and_then(|r| indistinguishability(&r, method, DEFAULT_TOL))
            .map_or(f64::NEG_INFINITY, |r| r.indist)
    };
    let (a, b) = (kappa.0.ln(), kappa.1.ln());
    let step = (b - a) / (COARSE_KAPPA_POINTS - 1) as f64;
    let coarse: Vec<f64> = (0..COARSE_KAPPA_POINTS).into_par_iter().map(|k| eval(a + step * k as f64)).collect();
    let best = (0..COARSE_KAPPA_POINTS).max_by(|&i, &j| coarse[i].total_cmp(&coarse[j])).unwrap();
    let mut lo = a + step * best.saturating_sub(1) as f64;
    let mut hi = (a + step * (best + 1) as f64).min(b);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    while hi - lo > 1e-3 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = eval(x1);
        }
    }
    [(a + step * best as f64, coarse[best]), (x1, f1), (x2, f2)]
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .map(|(x, f)| (x.exp(), f))
        .unwrap()
}

pub fn min_coupling_threshold(
    gammastar: f64,
    target: f64,
    bounds: SearchBounds,
) -> Result<ThresholdResult, QedError> {
    min_coupling_threshold_with_method(gammastar, target, bounds, Method::Eigen)
}

pub fn min_coupling_threshold_with_method(
    gammastar: f64,
    target: f64,
    bounds: SearchBounds,
    method: Method,
) -> Result<ThresholdResult, QedError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(QedError::InvalidInput(format!("target must lie in (0, 1), got {target}")));
    }
    if !(gammastar.is_finite() && gammastar >= 0.0) {
        return Err(QedError::InvalidInput(format!("gammastar must be >= 0, got {gammastar}")));
    }
    for (name, (lo, hi)) in [("g", bounds.g), ("kappa", bounds.kappa)] {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return Err(QedError::InvalidInput(format!("{name} bounds must satisfy 0 < lo < hi")));
        }
    }
    let best = |g: f64| best_over_kappa(g, gammastar, bounds.kappa, method);

    if gammastar == 0.0 {
        let (kappa_best, indist) = best(bounds.g.0);
        return Ok(ThresholdResult {
            g_min: bounds.g.0,
            kappa_best,
            indist,
            indist_below: indist,
            trivially_satisfied: true,
        });
    }

    let (mut k_hi, mut i_hi) = best(bounds.g.1);
    if !(i_hi >= target) {
        return Err(QedError::UnreachableTarget { target, best: i_hi });
    }
    let (mut lo, mut hi) = bounds.g;
    let (k_lo, i_lo) = best(lo);
    if i_lo >= target {
        let below = best(lo / BELOW_FACTOR).1;
        return Ok(ThresholdResult {
            g_min: lo,
            kappa_best: k_lo,
            indist: i_lo,
            indist_below: below,
            trivially_satisfied: false,
        });
    }
    while hi / lo > G_RATIO {
        let mid = (lo * hi).sqrt();
        let (k, i) = best(mid);
        if i >= target {
            hi = mid;
            k_hi = k;
            i_hi = i;
        } else {
            lo = mid;
        }
    }
    let below = best(hi / BELOW_FACTOR).1;
    Ok(ThresholdResult { g_min: hi, kappa_best: k_hi, indist: i_hi, indist_below: below, trivially_satisfied: false })
}
