//! One-hidden-layer perceptron with logistic units, trained by per-sample
//! backpropagation on squared error with validation-based early stopping.

use serde::{Deserialize, Serialize};

use super::{classes_seen, TaskDistribution, TrainingSample};
use crate::encoder::FeatureVector;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpHyperparams {
    pub hidden: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub validation_fraction: f64,
    /// Initial weights are uniform in `[-init_range, init_range]`.
    pub init_range: f64,
    pub seed: u64,
}

impl Default for MlpHyperparams {
    fn default() -> Self {
        MlpHyperparams {
            hidden: 32,
            learning_rate: 0.3,
            momentum: 0.0,
            max_epochs: 300,
            patience: 20,
            validation_fraction: 0.2,
            init_range: 0.05,
            seed: 0,
        }
    }
}

impl MlpHyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::invalid("hidden layer must have at least one unit"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::invalid("momentum must be in [0, 1)"));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction <= 0.5) {
            return Err(Error::invalid("validation fraction must be in (0, 0.5]"));
        }
        Ok(())
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    inputs: usize,
    hidden: usize,
    outputs: usize,
    /// Input-to-hidden weights, `hidden x inputs`, row-major.
    w1: Vec<f64>,
    b1: Vec<f64>,
    /// Hidden-to-output weights, `outputs x hidden`, row-major.
    w2: Vec<f64>,
    b2: Vec<f64>,
    seen: Vec<bool>,
    /// Validation MSE of the returned snapshot.
    pub validation_mse: f64,
    /// Epochs run before stopping.
    pub epochs: usize,
}

struct Backprop {
    hidden: Vec<f64>,
    output: Vec<f64>,
    delta_out: Vec<f64>,
    delta_hidden: Vec<f64>,
}

/// Gradient of the per-sample loss with the same shapes as the weights.
#[derive(Debug, Clone)]
struct Gradients {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

fn one_hot(label: usize, n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n];
    t[label] = 1.0;
    t
}

impl MlpModel {
    /// Network with every weight and bias equal to zero.
    pub fn zeros(inputs: usize, hidden: usize, outputs: usize) -> Self {
        MlpModel {
            inputs,
            hidden,
            outputs,
            w1: vec![0.0; hidden * inputs],
            b1: vec![0.0; hidden],
            w2: vec![0.0; outputs * hidden],
            b2: vec![0.0; outputs],
            seen: vec![true; outputs],
            validation_mse: f64::NAN,
            epochs: 0,
        }
    }

    /// Network with weights uniform in `[-range, range]`.
    pub fn random(inputs: usize, hidden: usize, outputs: usize, range: f64, rng: &mut SeededRng) -> Self {
        let mut m = MlpModel::zeros(inputs, hidden, outputs);
        for w in m
            .w1
            .iter_mut()
            .chain(m.b1.iter_mut())
            .chain(m.w2.iter_mut())
            .chain(m.b2.iter_mut())
        {
            *w = rng.uniform_in(-range, range);
        }
        m
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn num_weights(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    fn params(&self) -> [&Vec<f64>; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    fn params_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    fn all_finite(&self) -> bool {
        self.params().iter().all(|p| p.iter().all(|w| w.is_finite()))
    }

    /// Hidden and output activations. Zero inputs are skipped, which leaves
    /// the sums unchanged for the 0/1 vectors produced by the encoder.
    fn forward(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut h = self.b1.clone();
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (k, hk) in h.iter_mut().enumerate() {
                *hk += self.w1[k * self.inputs + j] * xj;
            }
        }
        for hk in h.iter_mut() {
            *hk = sigmoid(*hk);
        }
        let o = (0..self.outputs)
            .map(|c| {
                let row = &self.w2[c * self.hidden..(c + 1) * self.hidden];
                sigmoid(self.b2[c] + row.iter().zip(&h).map(|(w, hk)| w * hk).sum::<f64>())
            })
            .collect();
        (h, o)
    }

    /// Half the summed squared error on one sample.
    pub fn loss(&self, x: &[f64], target: &[f64]) -> f64 {
        let (_, o) = self.forward(x);
        0.5 * o.iter().zip(target).map(|(a, t)| (a - t) * (a - t)).sum::<f64>()
    }

    fn backprop(&self, x: &[f64], target: &[f64]) -> Backprop {
        let (hidden, output) = self.forward(x);
        let delta_out: Vec<f64> = output
            .iter()
            .zip(target)
            .map(|(&oc, &tc)| (oc - tc) * oc * (1.0 - oc))
            .collect();
        let delta_hidden: Vec<f64> = (0..self.hidden)
            .map(|k| {
                let back: f64 = delta_out
                    .iter()
                    .enumerate()
                    .map(|(c, &d)| self.w2[c * self.hidden + k] * d)
                    .sum();
                back * hidden[k] * (1.0 - hidden[k])
            })
            .collect();
        Backprop {
            hidden,
            output,
            delta_out,
            delta_hidden,
        }
    }

    fn gradients(&self, x: &[f64], target: &[f64]) -> Gradients {
        let bp = self.backprop(x, target);
        let mut w2 = vec![0.0; self.w2.len()];
        for (c, &d) in bp.delta_out.iter().enumerate() {
            for (k, &hk) in bp.hidden.iter().enumerate() {
                w2[c * self.hidden + k] = d * hk;
            }
        }
        let mut w1 = vec![0.0; self.w1.len()];
        for (k, &d) in bp.delta_hidden.iter().enumerate() {
            for (j, &xj) in x.iter().enumerate() {
                w1[k * self.inputs + j] = d * xj;
            }
        }
        Gradients {
            w1,
            b1: bp.delta_hidden,
            w2,
            b2: bp.delta_out,
        }
    }

    /// One incremental backpropagation step; returns the pre-update loss.
    fn step(&mut self, x: &[f64], target: &[f64], lr: f64, momentum: f64, velocity: &mut [Vec<f64>; 4]) -> f64 {
        let bp = self.backprop(x, target);
        let loss = 0.5
            * bp.output
                .iter()
                .zip(target)
                .map(|(a, t)| (a - t) * (a - t))
                .sum::<f64>();
        let apply = |w: &mut f64, v: &mut f64, g: f64| {
            let dw = -lr * g + momentum * *v;
            *v = dw;
            *w += dw;
        };
        let [v1, vb1, v2, vb2] = velocity;
        for (c, &d) in bp.delta_out.iter().enumerate() {
            for (k, &hk) in bp.hidden.iter().enumerate() {
                let i = c * self.hidden + k;
                apply(&mut self.w2[i], &mut v2[i], d * hk);
            }
            apply(&mut self.b2[c], &mut vb2[c], d);
        }
        for (k, &d) in bp.delta_hidden.iter().enumerate() {
            for (j, &xj) in x.iter().enumerate() {
                // Zero inputs have zero gradient; only momentum moves them.
                if xj != 0.0 || momentum != 0.0 {
                    let i = k * self.inputs + j;
                    apply(&mut self.w1[i], &mut v1[i], d * xj);
                }
            }
            apply(&mut self.b1[k], &mut vb1[k], d);
        }
        loss
    }

    /// Mean over samples and outputs of the squared error.
    pub fn mse(&self, inputs: &[Vec<f64>], labels: &[usize]) -> f64 {
        if inputs.is_empty() {
            return 0.0;
        }
        let total: f64 = inputs
            .iter()
            .zip(labels)
            .map(|(x, &l)| {
                let (_, o) = self.forward(x);
                o.iter()
                    .enumerate()
                    .map(|(c, &oc)| {
                        let t = if c == l { 1.0 } else { 0.0 };
                        (oc - t) * (oc - t)
                    })
                    .sum::<f64>()
            })
            .sum();
        total / (inputs.len() * self.outputs) as f64
    }

    pub fn train(samples: &[TrainingSample], num_classes: usize, hp: &MlpHyperparams) -> Result<Self> {
        hp.validate()?;
        let first = samples
            .first()
            .ok_or_else(|| Error::Training("no training samples".into()))?;
        let dim = first.features.len();
        let inputs: Vec<Vec<f64>> = samples.iter().map(|s| s.features.to_f64()).collect();
        let labels: Vec<usize> = samples.iter().map(|s| s.label).collect();

        let mut rng = SeededRng::new(hp.seed);
        let mut order: Vec<usize> = (0..samples.len()).collect();
        rng.shuffle(&mut order);
        let n = samples.len();
        let n_val = if n < 2 {
            0
        } else {
            ((n as f64 * hp.validation_fraction).round() as usize).clamp(1, n - 1)
        };
        let (val_idx, train_idx) = order.split_at(n_val);
        let mut train_idx = train_idx.to_vec();
        let val_x: Vec<Vec<f64>> = val_idx.iter().map(|&i| inputs[i].clone()).collect();
        let val_y: Vec<usize> = val_idx.iter().map(|&i| labels[i]).collect();

        let mut model = MlpModel::random(dim, hp.hidden, num_classes, hp.init_range, &mut rng);
        model.seen = classes_seen(samples, num_classes);
        let mut velocity = [
            vec![0.0; model.w1.len()],
            vec![0.0; model.b1.len()],
            vec![0.0; model.w2.len()],
            vec![0.0; model.b2.len()],
        ];
        let targets: Vec<Vec<f64>> = labels.iter().map(|&l| one_hot(l, num_classes)).collect();

        let mut best = model.clone();
        let mut best_mse = f64::INFINITY;
        let mut stale = 0;
        for epoch in 1..=hp.max_epochs.max(1) {
            rng.shuffle(&mut train_idx);
            let mut train_loss = 0.0;
            for &i in &train_idx {
                train_loss += model.step(&inputs[i], &targets[i], hp.learning_rate, hp.momentum, &mut velocity);
            }
            let monitor = if val_x.is_empty() {
                2.0 * train_loss / (train_idx.len() * num_classes) as f64
            } else {
                model.mse(&val_x, &val_y)
            };
            check_finite(epoch, monitor, &model)?;
            model.epochs = epoch;
            if monitor < best_mse {
                best_mse = monitor;
                model.validation_mse = monitor;
                best = model.clone();
                stale = 0;
            } else {
                stale += 1;
                if stale >= hp.patience {
                    break;
                }
            }
        }
        best.epochs = model.epochs;
        Ok(best)
    }

    /// Output activations; classes absent from training score 0.
    pub fn predict(&self, features: &FeatureVector) -> Result<TaskDistribution> {
        self.predict_dense(&features.to_f64())
    }

    pub fn predict_dense(&self, x: &[f64]) -> Result<TaskDistribution> {
        if x.len() != self.inputs {
            return Err(Error::LengthMismatch(x.len(), self.inputs));
        }
        let (_, o) = self.forward(x);
        let scores = o
            .into_iter()
            .zip(&self.seen)
            .map(|(v, &s)| if s { v } else { 0.0 })
            .collect();
        Ok(TaskDistribution::new(scores))
    }
}

/// Largest relative difference between backpropagated gradients of the
/// per-sample loss and central finite differences with step `1e-5`, over
/// every weight and bias.
pub fn gradient_check(model: &MlpModel, x: &[f64], target: &[f64]) -> f64 {
    const STEP: f64 = 1e-5;
    let analytic = model.gradients(x, target);
    let analytic = [&analytic.w1, &analytic.b1, &analytic.w2, &analytic.b2];
    let mut probe = model.clone();
    let mut worst = 0.0f64;
    for (p, grads) in analytic.iter().enumerate() {
        for i in 0..grads.len() {
            let orig = probe.params()[p][i];
            probe.params_mut()[p][i] = orig + STEP;
            let up = probe.loss(x, target);
            probe.params_mut()[p][i] = orig - STEP;
            let down = probe.loss(x, target);
            probe.params_mut()[p][i] = orig;
            let numeric = (up - down) / (2.0 * STEP);
            let a = grads[i];
            let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-8);
            worst = worst.max(rel);
        }
    }
    worst
}

/// Input-to-hidden gradient block, exposed for the chain-rule check on
/// zero inputs.
pub fn input_weight_gradients(model: &MlpModel, x: &[f64], target: &[f64]) -> Vec<f64> {
    model.gradients(x, target).w1
}

fn check_finite(epoch: usize, monitor: f64, model: &MlpModel) -> Result<()> {
    if monitor.is_finite() && model.all_finite() {
        Ok(())
    } else {
        Err(Error::Training(format!("loss diverged at epoch {epoch}")))
    }
}

/// One point of a hidden-width search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub hidden: usize,
    pub weights: usize,
    pub validation_mse: f64,
    pub epochs: usize,
}

impl SweepPoint {
    pub fn from_model(m: &MlpModel) -> Self {
        SweepPoint {
            hidden: m.hidden(),
            weights: m.num_weights(),
            validation_mse: m.validation_mse,
            epochs: m.epochs,
        }
    }
}
