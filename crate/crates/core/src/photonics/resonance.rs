//! Transmission-peak location and linewidth.
//!
//! A coarse scan picks the strongest interior local maximum,
//! golden-section search narrows the bracket, a parabola through the final
//! three points places the maximum, and bisection finds both half-maximum
//! crossings. Linewidths far below the grid spacing are still recovered: the
//! Lorentzian tails make the nearest grid point a local maximum.

use serde::{Deserialize, Serialize};

use super::stack::Stack;
use super::tmm::transmission;
use super::PhotonicsError;

pub const DEFAULT_PEAK_FLOOR: f64 = 1e-3;
const COARSE_POINTS: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub lambda0_nm: f64,
    pub fwhm_nm: f64,
    pub q: f64,
    pub peak_transmission: f64,
}

pub fn find_resonance(stack: &Stack, window_nm: (f64, f64)) -> Result<Resonance, PhotonicsError> {
    find_peak(|l| transmission(stack, l), window_nm, DEFAULT_PEAK_FLOOR)
}

/// Locates the strongest interior peak of `spectrum` inside `window_nm`.
pub fn find_peak<F>(spectrum: F, window_nm: (f64, f64), floor: f64) -> Result<Resonance, PhotonicsError>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = window_nm;
    assert!(lo > 0.0 && hi > lo, "search window must be positive and increasing");

    let step = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let grid = |i: usize| lo + step * i as f64;
    let samples: Vec<f64> = (0..COARSE_POINTS).map(|i| spectrum(grid(i))).collect();
    if samples.iter().any(|t| !t.is_finite()) {
        return Err(PhotonicsError::NumericalFailure("non-finite transmission".into()));
    }
    // Interior local maxima only: a rising band edge is not a resonance.
    let best = (1..COARSE_POINTS - 1)
        .filter(|&i| samples[i] > samples[i - 1] && samples[i] >= samples[i + 1])
        .max_by(|&i, &j| samples[i].total_cmp(&samples[j]))
        .ok_or_else(|| {
            PhotonicsError::NoResonance(format!("no interior transmission maximum in [{lo:.3}, {hi:.3}] nm"))
        })?;

    let (mut a, mut b) = (grid(best - 1), grid(best + 1));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (spectrum(x1), spectrum(x2));
    let tol = 4.0 * f64::EPSILON * hi;
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = spectrum(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = spectrum(x1);
        }
    }
    let (mut lambda0, mut peak) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    if let Some((x, y)) = parabola_vertex((a, spectrum(a)), (lambda0, peak), (b, spectrum(b))) {
        if x > a && x < b && y > peak {
            lambda0 = x;
            peak = spectrum(x);
        }
    }

    if peak < floor {
        return Err(PhotonicsError::NoResonance(format!(
            "peak transmission {peak:.3e} below floor {floor:.1e}"
        )));
    }

    let half = 0.5 * peak;
    let crossing = |direction: f64| -> Result<f64, PhotonicsError> {
        let mut h = (b - a).max(lambda0 * 1e-14);
        let mut inside = lambda0;
        loop {
            let probe = lambda0 + direction * h;
            if probe <= lo || probe >= hi {
                return Err(PhotonicsError::UnresolvedLinewidth(format!(
                    "half-maximum crossing beyond the window around {lambda0:.4} nm"
                )));
            }
            if spectrum(probe) < half {
                let mut outside = probe;
                for _ in 0..200 {
                    let mid = 0.5 * (inside + outside);
                    if mid == inside || mid == outside {
                        break;
                    }
                    if spectrum(mid) >= half {
                        inside = mid;
                    } else {
                        outside = mid;
                    }
                }
                return Ok(0.5 * (inside + outside));
            }
            inside = probe;
            h *= 2.0;
        }
    };
    let upper = crossing(1.0)?;
    let lower = crossing(-1.0)?;
    let fwhm_nm = upper - lower;
    Ok(Resonance { lambda0_nm: lambda0, fwhm_nm, q: lambda0 / fwhm_nm, peak_transmission: peak })
}

fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> Option<(f64, f64)> {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let d0 = (x0 - x1) * (x0 - x2);
    let d1 = (x1 - x0) * (x1 - x2);
    let d2 = (x2 - x0) * (x2 - x1);
    if d0 == 0.0 || d1 == 0.0 || d2 == 0.0 {
        return None;
    }
    let a = y0 / d0 + y1 / d1 + y2 / d2;
    let b = -(y0 * (x1 + x2) / d0 + y1 * (x0 + x2) / d1 + y2 * (x0 + x1) / d2);
    let c = y0 * x1 * x2 / d0 + y1 * x0 * x2 / d1 + y2 * x0 * x1 / d2;
    if a >= 0.0 {
        return None;
    }
    let x = -b / (2.0 * a);
    Some((x, a * x * x + b * x + c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentzian(center: f64, q: f64) -> impl Fn(f64) -> f64 {
        let hw = 0.5 * center / q;
        move |l: f64| 1.0 / (1.0 + ((l - center) / hw).powi(2))
    }

    #[test]
    fn recovers_injected_quality_factor() {
        for (c, q) in [(801.0, 500.0), (799.3, 50.0), (803.1, 2.0e6)] {
            let r = find_peak(lorentzian(c, q), (780.0, 820.0), 1e-3).unwrap();
            assert!((r.q / q - 1.0).abs() < 0.01, "q {q}: got {}", r.q);
            assert!((r.lambda0_nm - c).abs() < 1e-3 * c / q);
        }
    }

    #[test]
    fn flat_low_spectrum_has_no_resonance() {
        let err = find_peak(|l| 1e-5 * (1.0 + 1e-3 * (l - 800.0).powi(2)).recip(), (780.0, 820.0), 1e-3)
            .unwrap_err();
        assert!(matches!(err, PhotonicsError::NoResonance(_)));
    }

    #[test]
    fn broad_line_is_unresolved() {
        let err = find_peak(lorentzian(800.0, 5.0), (795.0, 805.0), 1e-3).unwrap_err();
        assert!(matches!(err, PhotonicsError::UnresolvedLinewidth(_)));
    }

    #[test]
    fn edge_maximum_is_rejected() {
        let err = find_peak(|l| l / 1000.0, (780.0, 820.0), 1e-3).unwrap_err();
        assert!(matches!(err, PhotonicsError::NoResonance(_)));
    }

    #[test]
    fn ignores_rising_edges() {
        let narrow = lorentzian(800.2, 1.0e9);
        let spectrum = |l: f64| narrow(l) + 1e-6 * ((l - 800.0) / 20.0).powi(8);
        let r = find_peak(spectrum, (780.0, 820.0), 1e-3).unwrap();
        assert!((r.q / 1.0e9 - 1.0).abs() < 0.01);
    }
}
