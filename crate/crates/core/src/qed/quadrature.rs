//! Composite Gauss–Legendre rules on graded panel meshes.

use std::f64::consts::PI;
use std::sync::OnceLock;

pub const GL_ORDER: usize = 32;

/// Nodes and weights on [−1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { p0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

pub fn rule32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Panel breakpoints `0 = b₀ < b₁ < … < b_N = end`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub breaks: Vec<f64>,
}

impl Mesh {
    /// Grades panel widths to the fastest rate still alive at each point.
    ///
    /// `rates` are generator eigenvalues; a mode with real part −a is
    /// considered alive at t while a·t < 40. The width at t is
    /// `resolution / max |λ|` over the live modes, or over all modes with
    /// the slowest decay once everything has faded.
    pub fn graded(end: f64, rates: &[num_complex::Complex64], resolution: f64) -> Self {
        assert!(end > 0.0 && resolution > 0.0);
        let slowest = rates.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min).max(1e-300);
        let width = |t: f64| {
            let fastest = rates
                .iter()
                .filter(|l| -l.re * t < 40.0)
                .map(|l| l.norm())
                .fold(0.0, f64::max);
            let w = resolution / if fastest > 0.0 { fastest } else { slowest };
            w.min(end)
        };
        let mut breaks = vec![0.0];
        let mut t = 0.0;
        while t < end {
            let next = (t + width(t)).min(end);
            // avoid a sliver panel at the end
            let next = if end - next < 1e-3 * (next - t) { end } else { next };
            breaks.push(next);
            t = next;
        }
        Self { breaks }
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    /// Every panel split in two.
    pub fn refined(&self) -> Self {
        let mut breaks = Vec::with_capacity(2 * self.breaks.len());
        for w in self.breaks.windows(2) {
            breaks.push(w[0]);
            breaks.push(0.5 * (w[0] + w[1]));
        }
        breaks.push(*self.breaks.last().unwrap());
        Self { breaks }
    }

    /// Composite 32-point rule: `(node, weight)` pairs in increasing order.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        Self::nodes_of(&self.breaks).collect()
    }

    /// Nodes of the panels delimited by a run of consecutive breakpoints.
    pub fn nodes_of(breaks: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (x, w) = rule32();
        breaks.windows(2).flat_map(move |p| {
            let mid = 0.5 * (p[0] + p[1]);
            let half = 0.5 * (p[1] - p[0]);
            x.iter().zip(w).map(move |(xi, wi)| (mid + half * xi, half * wi))
        })
    }
}
