//! Dense network with a sigmoid output and z-scored inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SurrogateError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Linear,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation's output.
    fn slope(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Linear => 1.0,
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tanh" => Ok(Self::Tanh),
            "linear" => Ok(Self::Linear),
            other => Err(format!("unknown activation '{other}' (expected tanh or linear)")),
        }
    }
}

/// `weights[l]` is row-major `layer_sizes[l+1] × layer_sizes[l]`. Hidden
/// layers use `activation`; the last layer is always a sigmoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateModel {
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    pub seed: u64,
}

/// Parameter-shaped buffer for gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &SurrogateModel) -> Self {
        Self {
            weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    fn clear(&mut self) {
        self.weights.iter_mut().chain(self.biases.iter_mut()).for_each(|v| v.fill(0.0));
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Glorot-uniform weights, zero biases, identity normalization.
pub fn init_model(layer_sizes: &[usize], activation: Activation, seed: u64) -> Result<SurrogateModel, SurrogateError> {
    check_sizes(layer_sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for pair in layer_sizes.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
        weights.push((0..fan_in * fan_out).map(|_| rng.random_range(-a..a)).collect());
        biases.push(vec![0.0; fan_out]);
    }
    let n = layer_sizes[0];
    Ok(SurrogateModel {
        layer_sizes: layer_sizes.to_vec(),
        activation,
        weights,
        biases,
        input_mean: vec![0.0; n],
        input_std: vec![1.0; n],
        seed,
    })
}

fn check_sizes(sizes: &[usize]) -> Result<(), SurrogateError> {
    if sizes.len() < 2 {
        return Err(SurrogateError::InvalidModel("need at least an input and an output layer".into()));
    }
    if sizes.contains(&0) {
        return Err(SurrogateError::InvalidModel("layer sizes must be positive".into()));
    }
    if *sizes.last().unwrap() != 1 {
        return Err(SurrogateError::InvalidModel("the output layer must have one unit".into()));
    }
    Ok(())
}

impl SurrogateModel {
    /// Checks that every array chains with its neighbours.
    pub fn validate(&self) -> Result<(), SurrogateError> {
        check_sizes(&self.layer_sizes)?;
        let layers = self.layer_sizes.len() - 1;
        if self.weights.len() != layers || self.biases.len() != layers {
            return Err(SurrogateError::InvalidModel(format!(
                "{} layer sizes imply {layers} weight layers, found {} weights and {} biases",
                self.layer_sizes.len(),
                self.weights.len(),
                self.biases.len()
            )));
        }
        for (l, pair) in self.layer_sizes.windows(2).enumerate() {
            if self.weights[l].len() != pair[0] * pair[1] || self.biases[l].len() != pair[1] {
                return Err(SurrogateError::InvalidModel(format!(
                    "layer {l} should be {}→{} but holds {} weights and {} biases",
                    pair[0],
                    pair[1],
                    self.weights[l].len(),
                    self.biases[l].len()
                )));
            }
        }
        let n = self.layer_sizes[0];
        if self.input_mean.len() != n || self.input_std.len() != n {
            return Err(SurrogateError::InvalidModel("normalization length differs from the input size".into()));
        }
        if self.input_std.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(SurrogateError::InvalidModel("normalization std must be positive".into()));
        }
        let finite = |v: &Vec<Vec<f64>>| v.iter().flatten().all(|x| x.is_finite());
        if !finite(&self.weights) || !finite(&self.biases) || self.input_mean.iter().any(|m| !m.is_finite()) {
            return Err(SurrogateError::InvalidModel("non-finite parameter".into()));
        }
        Ok(())
    }

    /// Builds dense layers from explicit `(weights, biases)` with shapes
    /// `(out × in, out)` and checks that they chain.
    pub fn from_layers(
        layers: Vec<(usize, usize, Vec<f64>, Vec<f64>)>,
        activation: Activation,
        seed: u64,
    ) -> Result<Self, SurrogateError> {
        let Some(first) = layers.first() else {
            return Err(SurrogateError::InvalidModel("no layers".into()));
        };
        let mut sizes = vec![first.0];
        for (l, (fan_in, fan_out, _, _)) in layers.iter().enumerate() {
            if *fan_in != *sizes.last().unwrap() {
                return Err(SurrogateError::InvalidModel(format!(
                    "layer {l} expects {fan_in} inputs but the previous layer has {} outputs",
                    sizes.last().unwrap()
                )));
            }
            sizes.push(*fan_out);
        }
        let n = sizes[0];
        let (weights, biases) = layers.into_iter().map(|(_, _, w, b)| (w, b)).unzip();
        let model = Self {
            layer_sizes: sizes,
            activation,
            weights,
            biases,
            input_mean: vec![0.0; n],
            input_std: vec![1.0; n],
            seed,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn num_parameters(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    pub fn normalize(&self, omega: &[f64]) -> Vec<f64> {
        omega
            .iter()
            .zip(self.input_mean.iter().zip(&self.input_std))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }

    pub fn predict(&self, omega: &[f64]) -> Result<f64, SurrogateError> {
        if omega.len() != self.input_size() {
            return Err(SurrogateError::DimensionMismatch { expected: self.input_size(), got: omega.len() });
        }
        let mut acts = Vec::new();
        Ok(self.forward(&self.normalize(omega), &mut acts))
    }

    /// Forward pass from normalized input. `acts` receives every layer's
    /// output, input first.
    pub(crate) fn forward(&self, input: &[f64], acts: &mut Vec<Vec<f64>>) -> f64 {
        acts.clear();
        acts.push(input.to_vec());
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let a = &acts[l];
            let n_in = a.len();
            let out: Vec<f64> = b
                .iter()
                .enumerate()
                .map(|(j, bj)| {
                    let z = bj + w[j * n_in..(j + 1) * n_in].iter().zip(a).map(|(w, x)| w * x).sum::<f64>();
                    if l == last {
                        sigmoid(z)
                    } else {
                        self.activation.apply(z)
                    }
                })
                .collect();
            acts.push(out);
        }
        acts[last + 1][0]
    }

    /// Adds `scale · ∂(y − target)²/∂θ` for one normalized sample into
    /// `grads` and returns the squared error.
    pub(crate) fn accumulate_gradient(
        &self,
        input: &[f64],
        target: f64,
        scale: f64,
        acts: &mut Vec<Vec<f64>>,
        grads: &mut Gradients,
    ) -> f64 {
        let y = self.forward(input, acts);
        let err = y - target;
        let mut delta = vec![scale * 2.0 * err * y * (1.0 - y)];
        for l in (0..self.weights.len()).rev() {
            let a = &acts[l];
            let n_in = a.len();
            for (j, d) in delta.iter().enumerate() {
                grads.biases[l][j] += d;
                let row = &mut grads.weights[l][j * n_in..(j + 1) * n_in];
                row.iter_mut().zip(a).for_each(|(g, x)| *g += d * x);
            }
            if l > 0 {
                let w = &self.weights[l];
                delta = (0..n_in)
                    .map(|i| {
                        let back: f64 = delta.iter().enumerate().map(|(j, d)| d * w[j * n_in + i]).sum();
                        back * self.activation.slope(a[i])
                    })
                    .collect();
            }
        }
        err * err
    }

    pub(crate) fn step(&mut self, grads: &Gradients, lr: f64) {
        let params = self.weights.iter_mut().chain(self.biases.iter_mut());
        let steps = grads.weights.iter().chain(&grads.biases);
        for (p, g) in params.zip(steps) {
            p.iter_mut().zip(g).for_each(|(p, g)| *p -= lr * g);
        }
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights.iter_mut().chain(self.biases.iter_mut()).flatten()
    }
}

/// Largest parameters allowed in [`gradient_check`].
pub const GRADIENT_CHECK_MAX_PARAMS: usize = 1000;
const FD_STEP: f64 = 1e-6;
/// Gradients smaller than this are compared in absolute terms.
const FD_FLOOR: f64 = 1e-5;

/// Largest relative discrepancy between backpropagated and central-difference
/// gradients of the squared error on one sample, over every parameter.
pub fn gradient_check(model: &SurrogateModel, omega: &[f64], target: f64) -> Result<f64, SurrogateError> {
    model.validate()?;
    if model.num_parameters() > GRADIENT_CHECK_MAX_PARAMS {
        return Err(SurrogateError::InvalidModel(format!(
            "gradient check is limited to {GRADIENT_CHECK_MAX_PARAMS} parameters, model has {}",
            model.num_parameters()
        )));
    }
    if omega.len() != model.input_size() {
        return Err(SurrogateError::DimensionMismatch { expected: model.input_size(), got: omega.len() });
    }
    let x = model.normalize(omega);
    let mut acts = Vec::new();
    let mut grads = Gradients::zeros_like(model);
    grads.clear();
    model.accumulate_gradient(&x, target, 1.0, &mut acts, &mut grads);
    let analytic: Vec<f64> = grads.weights.iter().chain(&grads.biases).flatten().copied().collect();

    let loss = |m: &SurrogateModel, acts: &mut Vec<Vec<f64>>| (m.forward(&x, acts) - target).powi(2);
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (k, a) in analytic.iter().enumerate() {
        let original = *probe.params_mut().nth(k).unwrap();
        *probe.params_mut().nth(k).unwrap() = original + FD_STEP;
        let up = loss(&probe, &mut acts);
        *probe.params_mut().nth(k).unwrap() = original - FD_STEP;
        let down = loss(&probe, &mut acts);
        *probe.params_mut().nth(k).unwrap() = original;
        let numeric = (up - down) / (2.0 * FD_STEP);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FD_FLOOR);
        worst = worst.max(rel);
    }
    Ok(worst)
}
