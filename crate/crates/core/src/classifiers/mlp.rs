//! One-hidden-layer tanh network trained by full-batch gradient descent on
//! mean squared error against ±1 targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Label;
use crate::linalg::{self, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Half-width of the uniform initialization; `None` uses `1/√fan_in`
    /// per layer.
    pub init_scale: Option<f64>,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 10,
            learning_rate: 0.01,
            epochs: 2000,
            init_scale: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// `hidden × input`
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

/// Gradient of the loss with the same shapes as the model parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpGradient {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpGradient {
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.w1.as_slice().to_vec();
        v.extend_from_slice(&self.b1);
        v.extend_from_slice(&self.w2);
        v.push(self.b2);
        v
    }
}

impl MlpModel {
    pub fn zeros(input: usize, hidden: usize) -> MlpModel {
        MlpModel {
            w1: Matrix::zeros(hidden, input),
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        }
    }

    pub fn random(input: usize, hidden: usize, init_scale: Option<f64>, rng: &mut impl Rng) -> MlpModel {
        let s1 = init_scale.unwrap_or(1.0 / (input.max(1) as f64).sqrt());
        let s2 = init_scale.unwrap_or(1.0 / (hidden.max(1) as f64).sqrt());
        let w1 = Matrix::from_fn(hidden, input, |_, _| rng.gen_range(-s1..=s1));
        let w2 = (0..hidden).map(|_| rng.gen_range(-s2..=s2)).collect();
        MlpModel {
            w1,
            b1: vec![0.0; hidden],
            w2,
            b2: 0.0,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w1.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w1.rows()
    }

    fn hidden_activations(&self, x: &[f64]) -> Vec<f64> {
        (0..self.hidden_dim())
            .map(|j| (linalg::dot(self.w1.row(j), x) + self.b1[j]).tanh())
            .collect()
    }

    /// `tanh(w2 · tanh(W1 x + b1) + b2)`
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        let h = self.hidden_activations(x);
        Ok((linalg::dot(&self.w2, &h) + self.b2).tanh())
    }

    pub fn predict(&self, x: &[f64]) -> Result<(Label, f64)> {
        let s = self.score(x)?;
        Ok((Label::from_score(s), s))
    }

    /// Mean squared error `(1/n) Σ (score(x) − t)²` and its gradient.
    pub fn loss_and_gradient(&self, xs: &[Vec<f64>], targets: &[f64]) -> (f64, MlpGradient) {
        let n = xs.len().max(1) as f64;
        let hidden = self.hidden_dim();
        let mut grad = MlpGradient {
            w1: Matrix::zeros(hidden, self.input_dim()),
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        };
        let mut loss = 0.0;
        for (x, &t) in xs.iter().zip(targets) {
            let h = self.hidden_activations(x);
            let o = (linalg::dot(&self.w2, &h) + self.b2).tanh();
            let err = o - t;
            loss += err * err;
            let delta_out = 2.0 * err / n * (1.0 - o * o);
            grad.b2 += delta_out;
            for j in 0..hidden {
                grad.w2[j] += delta_out * h[j];
                let delta_h = delta_out * self.w2[j] * (1.0 - h[j] * h[j]);
                grad.b1[j] += delta_h;
                linalg::axpy(delta_h, x, grad.w1.row_mut(j));
            }
        }
        (loss / n, grad)
    }

    pub fn parameters(&self) -> Vec<f64> {
        let mut v = self.w1.as_slice().to_vec();
        v.extend_from_slice(&self.b1);
        v.extend_from_slice(&self.w2);
        v.push(self.b2);
        v
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        let (h, d) = (self.hidden_dim(), self.input_dim());
        let expected = h * d + 2 * h + 1;
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: params.len(),
            });
        }
        self.w1 = Matrix::from_vec(h, d, params[..h * d].to_vec())?;
        self.b1 = params[h * d..h * d + h].to_vec();
        self.w2 = params[h * d + h..h * d + 2 * h].to_vec();
        self.b2 = params[expected - 1];
        Ok(())
    }

    fn step(&mut self, grad: &MlpGradient, lr: f64) {
        for (w, g) in self.w1.as_mut_slice().iter_mut().zip(grad.w1.as_slice()) {
            *w -= lr * g;
        }
        linalg::axpy(-lr, &grad.b1, &mut self.b1);
        linalg::axpy(-lr, &grad.w2, &mut self.w2);
        self.b2 -= lr * grad.b2;
    }

    pub fn all_finite(&self) -> bool {
        self.parameters().iter().all(|v| v.is_finite())
    }
}

pub fn mlp_train(xs: &[Vec<f64>], labels: &[Label], cfg: &MlpConfig, seed: u64) -> Result<MlpModel> {
    if xs.len() != labels.len() {
        return Err(Error::LengthMismatch(format!(
            "{} samples but {} labels",
            xs.len(),
            labels.len()
        )));
    }
    if xs.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let d = xs[0].len();
    if let Some(bad) = xs.iter().find(|x| x.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
    }
    if !(cfg.learning_rate > 0.0) || cfg.hidden == 0 {
        return Err(Error::UnsupportedConfig(format!("invalid MLP config {cfg:?}")));
    }
    let targets: Vec<f64> = labels.iter().map(|l| l.as_f64()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = MlpModel::random(d, cfg.hidden, cfg.init_scale, &mut rng);
    for epoch in 0..cfg.epochs {
        let (loss, grad) = model.loss_and_gradient(xs, &targets);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss(epoch));
        }
        model.step(&grad, cfg.learning_rate);
        if !model.all_finite() {
            return Err(Error::NonFiniteLoss(epoch));
        }
    }
    Ok(model)
}
