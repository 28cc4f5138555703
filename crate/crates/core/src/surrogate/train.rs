//! Plain mini-batch gradient descent on the mean squared error.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::model::{Gradients, SurrogateModel};
use super::SurrogateError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub holdout_fraction: f64,
    /// Epochs without a new best monitored loss before stopping.
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 2000, batch_size: 32, learning_rate: 1e-2, holdout_fraction: 0.2, patience: 50, seed: 0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), SurrogateError> {
        let bad = |m: &str| Err(SurrogateError::InvalidConfig(m.into()));
        if self.epochs == 0 || self.batch_size == 0 || self.patience == 0 {
            return bad("epochs, batch_size and patience must be positive");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return bad("holdout_fraction must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Training-split MSE; entry 0 is the untrained model.
    pub train_loss: Vec<f64>,
    /// Holdout MSE per entry of `train_loss`; empty without a holdout.
    pub holdout_loss: Vec<f64>,
    /// Index into the loss vectors of the returned weights.
    pub best_epoch: usize,
    pub stopped_early: bool,
    pub train_rows: Vec<usize>,
    pub holdout_rows: Vec<usize>,
}

impl TrainHistory {
    /// The loss that drives early stopping.
    pub fn monitored(&self) -> &[f64] {
        if self.holdout_loss.is_empty() {
            &self.train_loss
        } else {
            &self.holdout_loss
        }
    }

    /// Best monitored loss seen up to each entry.
    pub fn running_best(&self) -> Vec<f64> {
        self.monitored()
            .iter()
            .scan(f64::INFINITY, |best, &l| {
                *best = best.min(l);
                Some(*best)
            })
            .collect()
    }

    pub fn holdout_rmse(&self) -> Option<f64> {
        self.holdout_loss.get(self.best_epoch).map(|l| l.sqrt())
    }

    pub fn train_rmse(&self) -> f64 {
        self.train_loss[self.best_epoch].sqrt()
    }
}

fn mse(model: &SurrogateModel, x: &[Vec<f64>], y: &[f64], rows: &[usize], acts: &mut Vec<Vec<f64>>) -> f64 {
    if rows.is_empty() {
        return f64::NAN;
    }
    rows.iter().map(|&i| (model.forward(&x[i], acts) - y[i]).powi(2)).sum::<f64>() / rows.len() as f64
}

/// Trains a copy of `model`. The holdout is a seeded shuffle of row indices;
/// `floor(n · holdout_fraction)` rows are held out, possibly none on tiny
/// sets, in which case the training loss drives early stopping. Input
/// statistics come from the training rows only. The returned model carries
/// the weights of the best monitored epoch.
pub fn train(
    model: &SurrogateModel,
    data: &Dataset,
    config: &TrainConfig,
) -> Result<(SurrogateModel, TrainHistory), SurrogateError> {
    config.validate()?;
    model.validate()?;
    if data.len() < 2 {
        return Err(SurrogateError::InvalidDataset(format!("need at least 2 valid rows, got {}", data.len())));
    }
    if data.features() != model.input_size() {
        return Err(SurrogateError::DimensionMismatch { expected: model.input_size(), got: data.features() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut rng);
    let n_hold = ((data.len() as f64 * config.holdout_fraction).floor() as usize).min(data.len() - 1);
    let mut holdout_rows = order[..n_hold].to_vec();
    let mut train_rows = order[n_hold..].to_vec();
    holdout_rows.sort_unstable();
    train_rows.sort_unstable();

    let mut net = model.clone();
    let d = data.features();
    let m = train_rows.len() as f64;
    net.input_mean = (0..d).map(|j| train_rows.iter().map(|&i| data.inputs[i][j]).sum::<f64>() / m).collect();
    net.input_std = (0..d)
        .map(|j| {
            let mu = net.input_mean[j];
            let var = train_rows.iter().map(|&i| (data.inputs[i][j] - mu).powi(2)).sum::<f64>() / m;
            // a constant feature carries no information; leave it unscaled
            if var > 0.0 {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let x: Vec<Vec<f64>> = data.inputs.iter().map(|w| net.normalize(w)).collect();
    let y = &data.targets;

    let mut acts = Vec::new();
    let mut history = TrainHistory {
        train_loss: vec![mse(&net, &x, y, &train_rows, &mut acts)],
        holdout_loss: Vec::new(),
        best_epoch: 0,
        stopped_early: false,
        train_rows: train_rows.clone(),
        holdout_rows: holdout_rows.clone(),
    };
    if n_hold > 0 {
        history.holdout_loss.push(mse(&net, &x, y, &holdout_rows, &mut acts));
    }
    let mut best = net.clone();
    let mut best_loss = *history.monitored().last().unwrap();
    let mut grads = Gradients::zeros_like(&net);
    let mut batch_order = train_rows.clone();

    for epoch in 1..=config.epochs {
        batch_order.shuffle(&mut rng);
        for batch in batch_order.chunks(config.batch_size) {
            grads.weights.iter_mut().chain(grads.biases.iter_mut()).for_each(|g| g.fill(0.0));
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                net.accumulate_gradient(&x[i], y[i], scale, &mut acts, &mut grads);
            }
            net.step(&grads, config.learning_rate);
        }
        let train_loss = mse(&net, &x, y, &train_rows, &mut acts);
        if !train_loss.is_finite() {
            return Err(SurrogateError::TrainingDiverged { epoch });
        }
        history.train_loss.push(train_loss);
        if n_hold > 0 {
            history.holdout_loss.push(mse(&net, &x, y, &holdout_rows, &mut acts));
        }
        let monitored = *history.monitored().last().unwrap();
        if monitored < best_loss {
            best_loss = monitored;
            best = net.clone();
            history.best_epoch = epoch;
        } else if epoch - history.best_epoch >= config.patience {
            history.stopped_early = true;
            break;
        }
    }
    Ok((best, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::dataset::DatasetMeta;
    use crate::surrogate::model::{init_model, Activation};
    use rand::Rng;

    fn toy(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<Vec<f64>> = (0..n).map(|_| (0..4).map(|_| rng.random_range(25.0..75.0)).collect()).collect();
        let targets = inputs.iter().map(|w| 0.2 + 0.6 * ((w[0] - w[3]) / 50.0).powi(2)).collect();
        Dataset::new(inputs, targets, DatasetMeta::default()).unwrap()
    }

    #[test]
    fn ten_samples_are_memorised() {
        let data = toy(10, 4);
        let model = init_model(&[4, 16, 1], Activation::Tanh, 2).unwrap();
        let cfg = TrainConfig {
            epochs: 20_000,
            batch_size: 10,
            learning_rate: 0.5,
            holdout_fraction: 0.05,
            patience: 20_000,
            seed: 1,
        };
        let (net, h) = train(&model, &data, &cfg).unwrap();
        assert!(h.holdout_rows.is_empty());
        assert!(h.train_loss[h.best_epoch] < 1e-4, "{}", h.train_loss[h.best_epoch]);
        for (x, t) in data.inputs.iter().zip(&data.targets) {
            assert!((net.predict(x).unwrap() - t).abs() < 0.01);
        }
    }

    #[test]
    fn constant_targets_are_learned() {
        let mut data = toy(40, 5);
        data.targets.iter_mut().for_each(|t| *t = 0.37);
        let model = init_model(&[4, 8, 1], Activation::Tanh, 0).unwrap();
        let cfg = TrainConfig { epochs: 20_000, learning_rate: 0.5, patience: 500, ..Default::default() };
        let (net, _) = train(&model, &data, &cfg).unwrap();
        for x in &data.inputs {
            assert!((net.predict(x).unwrap() - 0.37).abs() < 0.01);
        }
    }

    #[test]
    fn training_is_reproducible_and_improves() {
        let data = toy(200, 6);
        let model = init_model(&[4, 12, 1], Activation::Tanh, 3).unwrap();
        let cfg = TrainConfig { epochs: 60, ..Default::default() };
        let (a, ha) = train(&model, &data, &cfg).unwrap();
        let (b, hb) = train(&model, &data, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha, hb);
        assert!(ha.train_loss[ha.best_epoch] < ha.train_loss[0]);
        assert!(ha.running_best().windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(ha.holdout_rows.len(), 40);
    }

    #[test]
    fn statistics_ignore_holdout_rows() {
        let data = toy(50, 7);
        let model = init_model(&[4, 6, 1], Activation::Tanh, 3).unwrap();
        let cfg = TrainConfig { epochs: 2, ..Default::default() };
        let (a, h) = train(&model, &data, &cfg).unwrap();
        // scramble the holdout rows among themselves
        let mut perm = data.clone();
        let rows = &h.holdout_rows;
        for (k, &i) in rows.iter().enumerate() {
            let j = rows[(k + 3) % rows.len()];
            perm.inputs[i] = data.inputs[j].iter().map(|w| w * 1.01).collect();
            perm.targets[i] = data.targets[j];
        }
        let (b, _) = train(&model, &perm, &cfg).unwrap();
        assert_eq!(a.input_mean, b.input_mean);
        assert_eq!(a.input_std, b.input_std);
    }

    #[test]
    fn divergence_names_the_epoch() {
        let data = toy(20, 8);
        let model = init_model(&[4, 8, 1], Activation::Linear, 0).unwrap();
        let mut cfg = TrainConfig { epochs: 50, learning_rate: 1e300, ..Default::default() };
        cfg.batch_size = 4;
        match train(&model, &data, &cfg) {
            Err(SurrogateError::TrainingDiverged { epoch }) => assert_eq!(epoch, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let data = toy(10, 9);
        let model = init_model(&[4, 1], Activation::Tanh, 0).unwrap();
        for cfg in [
            TrainConfig { holdout_fraction: 1.0, ..Default::default() },
            TrainConfig { learning_rate: 0.0, ..Default::default() },
            TrainConfig { batch_size: 0, ..Default::default() },
        ] {
            assert!(matches!(train(&model, &data, &cfg), Err(SurrogateError::InvalidConfig(_))));
        }
        let wrong = init_model(&[3, 1], Activation::Tanh, 0).unwrap();
        assert!(train(&wrong, &data, &TrainConfig::default()).is_err());
    }
}
