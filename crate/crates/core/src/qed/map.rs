//! Indistinguishability over log-spaced (g, κ) grids and their iso-regions.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::indist::{indistinguishability, Method};
use super::rates::RateSet;
use super::QedError;

/// `values[i][j]` is I at (g_axis[i], kappa_axis[j]); `None` where the
/// evaluation failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapGrid {
    pub g_axis: Vec<f64>,
    pub kappa_axis: Vec<f64>,
    pub gammastar: f64,
    pub values: Vec<Vec<Option<f64>>>,
}

impl MapGrid {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i][j]
    }

    pub fn failed_cells(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_none()).count()
    }
}

pub fn log_axis(range: (f64, f64), n: usize) -> Result<Vec<f64>, QedError> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(QedError::InvalidInput(format!("axis range must satisfy 0 < lo < hi, got ({lo}, {hi})")));
    }
    if n < 2 {
        return Err(QedError::InvalidInput(format!("grid needs n >= 2, got {n}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|k| match k {
            0 => lo,
            k if k == n - 1 => hi,
            k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

pub fn indist_map(
    gammastar: f64,
    g_range: (f64, f64),
    kappa_range: (f64, f64),
    n: usize,
    tol: f64,
) -> Result<MapGrid, QedError> {
    indist_map_with_method(gammastar, g_range, kappa_range, n, tol, Method::Eigen)
}

pub fn indist_map_with_method(
    gammastar: f64,
    g_range: (f64, f64),
    kappa_range: (f64, f64),
    n: usize,
    tol: f64,
    method: Method,
) -> Result<MapGrid, QedError> {
    if !(gammastar.is_finite() && gammastar >= 0.0) {
        return Err(QedError::InvalidInput(format!("gammastar must be >= 0, got {gammastar}")));
    }
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(QedError::InvalidInput(format!("tol must lie in (0, 1e-3], got {tol}")));
    }
    let g_axis = log_axis(g_range, n)?;
    let kappa_axis = log_axis(kappa_range, n)?;
    let flat: Vec<Option<f64>> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            RateSet::new(g_axis[i], kappa_axis[j], gammastar)
                .and_then(|r| indistinguishability(&r, method, tol))
                .ok()
                .map(|r| r.indist)
        })
        .collect();
    let values = flat.chunks(n).map(|row| row.to_vec()).collect();
    Ok(MapGrid { g_axis, kappa_axis, gammastar, values })
}

/// Cells above a threshold and the marching-squares boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoRegion {
    pub threshold: f64,
    /// (i, j) grid indices with I > threshold.
    pub cells: Vec<(usize, usize)>,
    /// Boundary polylines as (g, κ) points, interpolated in log space.
    pub boundary: Vec<Vec<(f64, f64)>>,
    pub min_g: Option<f64>,
    pub min_kappa: Option<f64>,
}

impl IsoRegion {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Grid edge holding a contour crossing: the lower-left vertex and
/// whether the edge runs along κ (`true`) or along g.
type EdgeKey = (usize, usize, bool);

pub fn iso_region(map: &MapGrid, threshold: f64) -> Result<IsoRegion, QedError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(QedError::InvalidInput(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let ng = map.g_axis.len();
    let nk = map.kappa_axis.len();
    let inside = |i: usize, j: usize| map.values[i][j].is_some_and(|v| v > threshold);

    let mut cells = Vec::new();
    for i in 0..ng {
        for j in 0..nk {
            if inside(i, j) {
                cells.push((i, j));
            }
        }
    }
    let min_g = cells.iter().map(|&(i, _)| map.g_axis[i]).reduce(f64::min);
    let min_kappa = cells.iter().map(|&(_, j)| map.kappa_axis[j]).reduce(f64::min);

    // Failed cells contour as if far below the threshold.
    let value = |i: usize, j: usize| map.values[i][j].unwrap_or(f64::NEG_INFINITY);
    let point = |e: EdgeKey| -> (f64, f64) {
        let (i, j, along_kappa) = e;
        let (i2, j2) = if along_kappa { (i, j + 1) } else { (i + 1, j) };
        let (v1, v2) = (value(i, j), value(i2, j2));
        let frac = if v1.is_finite() && v2.is_finite() && v1 != v2 {
            ((threshold - v1) / (v2 - v1)).clamp(0.0, 1.0)
        } else if v1.is_finite() {
            1.0
        } else {
            0.0
        };
        let lerp = |a: f64, b: f64| (a.ln() + frac * (b.ln() - a.ln())).exp();
        (lerp(map.g_axis[i], map.g_axis[i2]), lerp(map.kappa_axis[j], map.kappa_axis[j2]))
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for i in 0..ng.saturating_sub(1) {
        for j in 0..nk.saturating_sub(1) {
            // corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1)
            let c = [inside(i, j), inside(i + 1, j), inside(i + 1, j + 1), inside(i, j + 1)];
            let bottom = (i, j, false);
            let right = (i + 1, j, true);
            let top = (i, j + 1, false);
            let left = (i, j, true);
            let case = c.iter().enumerate().fold(0u8, |acc, (k, &b)| acc | ((b as u8) << k));
            let mut push = |a, b| segments.push((a, b));
            match case {
                0 | 15 => {}
                1 | 14 => push(left, bottom),
                2 | 13 => push(bottom, right),
                3 | 12 => push(left, right),
                4 | 11 => push(right, top),
                6 | 9 => push(bottom, top),
                7 | 8 => push(left, top),
                5 | 10 => {
                    let centre = [value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)];
                    let mean = centre.iter().sum::<f64>() / 4.0;
                    let centre_inside = mean > threshold;
                    if (case == 5) == centre_inside {
                        push(left, top);
                        push(bottom, right);
                    } else {
                        push(left, bottom);
                        push(right, top);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    Ok(IsoRegion { threshold, cells, boundary: chain(&segments, point), min_g, min_kappa })
}

fn chain(segments: &[(EdgeKey, EdgeKey)], point: impl Fn(EdgeKey) -> (f64, f64)) -> Vec<Vec<(f64, f64)>> {
    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        by_edge.entry(*a).or_default().push(k);
        by_edge.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    // Open chains start at edges touched once; closed loops are picked up after.
    let mut starts: Vec<usize> = (0..segments.len())
        .filter(|&k| {
            let (a, b) = segments[k];
            by_edge[&a].len() == 1 || by_edge[&b].len() == 1
        })
        .collect();
    starts.extend(0..segments.len());
    for start in starts {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let (first, mut tip) = if by_edge[&b].len() == 1 { (b, a) } else { (a, b) };
        let mut keys = vec![first, tip];
        loop {
            let next = by_edge[&tip].iter().copied().find(|&k| !used[k]);
            let Some(k) = next else { break };
            used[k] = true;
            let (a, b) = segments[k];
            tip = if a == tip { b } else { a };
            keys.push(tip);
        }
        lines.push(keys.into_iter().map(&point).collect());
    }
    lines
}
