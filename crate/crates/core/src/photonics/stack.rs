//! One-dimensional layer stacks.

use num_complex::Complex64;

use super::geometry::{CavityGeometry, IndexModel};
use super::PhotonicsError;

/// Segment role inside a cavity stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Corrugated,
    Plain,
    Cavity,
    /// Layer of a hand-built stack.
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    /// Complex refractive index; a positive imaginary part is absorbing.
    pub index: Complex64,
    pub thickness_nm: f64,
    pub kind: SegmentKind,
}

impl Layer {
    pub fn new(index: f64, thickness_nm: f64) -> Self {
        Self { index: Complex64::new(index, 0.0), thickness_nm, kind: SegmentKind::Generic }
    }
}

/// Finite layer sequence between two semi-infinite media.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    pub input_index: f64,
    pub output_index: f64,
    pub layers: Vec<Layer>,
}

impl Stack {
    pub fn new(input_index: f64, output_index: f64, layers: Vec<Layer>) -> Self {
        Self { input_index, output_index, layers }
    }

    pub fn total_length_nm(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness_nm).sum()
    }

    /// Same media traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut layers = self.layers.clone();
        layers.reverse();
        Self { input_index: self.output_index, output_index: self.input_index, layers }
    }

    pub fn is_lossless(&self) -> bool {
        self.layers.iter().all(|l| l.index.im == 0.0)
    }
}

/// Lays out `half-space | left mirror | cavity | right mirror | half-space`.
///
/// Each mirror period is a corrugated half-period of index
/// `n_slot_mode + slope·(ω_i − w_ref)` and a plain half-period at
/// `n_slot_mode`. The plain half-periods face the cavity; corrugation `i`
/// sits at the same distance from the cavity on both sides, so the layer
/// list reads the same in both directions.
pub fn build_stack(geometry: &CavityGeometry, model: &IndexModel) -> Result<Stack, PhotonicsError> {
    geometry.validate(None)?;
    model.validate()?;

    // Uniform absorption n(1 + i/2Q) gives a material quality factor Q.
    let loss = model.q_loss.map_or(0.0, |q| 0.5 / q);
    let complex = |n: f64| Complex64::new(n, n * loss);

    let half = 0.5 * geometry.period_nm;
    let plain = Layer {
        index: complex(model.n_slot_mode),
        thickness_nm: half,
        kind: SegmentKind::Plain,
    };
    let mut corrugated = Vec::with_capacity(geometry.periods);
    for (i, &w) in geometry.corrugation_widths_nm.iter().enumerate() {
        let n = model.corrugated_index(w);
        if !(n > 1.0) {
            return Err(PhotonicsError::InvalidCalibration(format!(
                "corrugation {i} (width {w} nm) maps to index {n} <= 1"
            )));
        }
        corrugated.push(Layer { index: complex(n), thickness_nm: half, kind: SegmentKind::Corrugated });
    }

    let mut layers = Vec::with_capacity(4 * geometry.periods + 1);
    for c in corrugated.iter().rev() {
        layers.push(*c);
        layers.push(plain);
    }
    layers.push(Layer {
        index: complex(model.n_slot_mode),
        thickness_nm: geometry.cavity_length_nm,
        kind: SegmentKind::Cavity,
    });
    for c in &corrugated {
        layers.push(plain);
        layers.push(*c);
    }

    Ok(Stack::new(model.n_slot_mode, model.n_slot_mode, layers))
}
