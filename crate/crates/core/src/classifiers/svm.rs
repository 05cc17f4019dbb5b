//! Soft-margin RBF support vector machine trained by sequential minimal
//! optimization with maximal-gain working-pair selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Label;
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub c: f64,
    pub gamma: f64,
    /// Stop once the maximal KKT violation `m(α) − M(α)` drops below this.
    pub tol: f64,
    /// Iteration budget in multiples of the training-set size.
    pub max_passes: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 10.0,
            gamma: 1.0,
            tol: 1e-3,
            max_passes: 1000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    pub max_violation: f64,
    /// Dual objective `Σα − ½ ΣΣ αᵢαⱼyᵢyⱼK(xᵢ,xⱼ)` at termination.
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `αᵢ yᵢ` for each support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub diagnostics: SvmDiagnostics,
}

pub fn rbf_kernel(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    (-gamma * linalg::squared_distance(a, b)).exp()
}

impl SvmModel {
    pub fn input_dim(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// `Σ αᵢyᵢ K(xᵢ, x) + b`
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        let d = self.input_dim();
        if !self.support_vectors.is_empty() && x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, c)| c * rbf_kernel(self.gamma, sv, x))
            .sum::<f64>()
            + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<(Label, f64)> {
        let s = self.decision(x)?;
        Ok((Label::from_score(s), s))
    }

    /// Dual multipliers of the support vectors.
    pub fn alphas(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.abs()).collect()
    }
}

struct Solver<'a> {
    kernel: Vec<f64>,
    n: usize,
    y: &'a [f64],
    c: f64,
    alpha: Vec<f64>,
    /// Gradient of `½αᵀQα − eᵀα`, with `Q_ij = yᵢyⱼK_ij`.
    grad: Vec<f64>,
}

impl Solver<'_> {
    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.n + j]
    }

    fn in_up(&self, t: usize) -> bool {
        (self.y[t] > 0.0 && self.alpha[t] < self.c) || (self.y[t] < 0.0 && self.alpha[t] > 0.0)
    }

    fn in_low(&self, t: usize) -> bool {
        (self.y[t] < 0.0 && self.alpha[t] < self.c) || (self.y[t] > 0.0 && self.alpha[t] > 0.0)
    }

    /// Returns `(i, j, m − M)`; `j` is `None` when no pair improves the objective.
    fn select_pair(&self) -> (Option<usize>, Option<usize>, f64) {
        let mut i = None;
        let mut m = f64::NEG_INFINITY;
        for t in 0..self.n {
            let v = -self.y[t] * self.grad[t];
            if self.in_up(t) && v > m {
                m = v;
                i = Some(t);
            }
        }
        let Some(i_idx) = i else {
            return (None, None, 0.0);
        };
        let mut j = None;
        let mut big_m = f64::INFINITY;
        let mut best_gain = f64::NEG_INFINITY;
        for t in 0..self.n {
            if !self.in_low(t) {
                continue;
            }
            let v = -self.y[t] * self.grad[t];
            big_m = big_m.min(v);
            let b = m - v;
            if b > 0.0 {
                let a = (self.k(i_idx, i_idx) + self.k(t, t) - 2.0 * self.k(i_idx, t)).max(1e-12);
                let gain = b * b / a;
                if gain > best_gain {
                    best_gain = gain;
                    j = Some(t);
                }
            }
        }
        let gap = if big_m.is_finite() { m - big_m } else { 0.0 };
        (i, j, gap)
    }

    /// Moves `αᵢ += yᵢδ`, `αⱼ −= yⱼδ` by the clipped optimal step `δ > 0`.
    fn update(&mut self, i: usize, j: usize) {
        let b = -self.y[i] * self.grad[i] + self.y[j] * self.grad[j];
        let a = (self.k(i, i) + self.k(j, j) - 2.0 * self.k(i, j)).max(1e-12);
        let room_i = if self.y[i] > 0.0 { self.c - self.alpha[i] } else { self.alpha[i] };
        let room_j = if self.y[j] > 0.0 { self.alpha[j] } else { self.c - self.alpha[j] };
        let delta = (b / a).min(room_i).min(room_j);
        let snap = |v: f64, c: f64| {
            if v <= 1e-12 * c {
                0.0
            } else if v >= c * (1.0 - 1e-12) {
                c
            } else {
                v
            }
        };
        self.alpha[i] = snap(self.alpha[i] + self.y[i] * delta, self.c);
        self.alpha[j] = snap(self.alpha[j] - self.y[j] * delta, self.c);
        for t in 0..self.n {
            self.grad[t] += self.y[t] * delta * (self.k(t, i) - self.k(t, j));
        }
    }

    fn bias(&self) -> f64 {
        let mut free_sum = 0.0;
        let mut free_count = 0usize;
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for t in 0..self.n {
            let v = -self.y[t] * self.grad[t];
            let a = self.alpha[t];
            if a > 0.0 && a < self.c {
                free_sum += v;
                free_count += 1;
            } else if (a == 0.0) == (self.y[t] > 0.0) {
                lower = lower.max(v);
            } else {
                upper = upper.min(v);
            }
        }
        if free_count > 0 {
            free_sum / free_count as f64
        } else if lower.is_finite() && upper.is_finite() {
            0.5 * (lower + upper)
        } else if lower.is_finite() {
            lower
        } else if upper.is_finite() {
            upper
        } else {
            0.0
        }
    }

    fn objective(&self) -> f64 {
        // ½αᵀQα = ½Σ αₜ(gₜ + 1)
        self.alpha
            .iter()
            .zip(&self.grad)
            .map(|(a, g)| a - 0.5 * a * (g + 1.0))
            .sum()
    }
}

pub fn svm_train(xs: &[Vec<f64>], labels: &[Label], cfg: &SvmConfig) -> Result<SvmModel> {
    if xs.len() != labels.len() {
        return Err(Error::LengthMismatch(format!(
            "{} samples but {} labels",
            xs.len(),
            labels.len()
        )));
    }
    let d = xs.first().map_or(0, Vec::len);
    if let Some(bad) = xs.iter().find(|x| x.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
    }
    if !labels.contains(&Label::Female) || !labels.contains(&Label::Male) {
        return Err(Error::SingleClass);
    }
    if !(cfg.c > 0.0) || !(cfg.gamma > 0.0) || !(cfg.tol > 0.0) {
        return Err(Error::UnsupportedConfig(format!("invalid SVM config {cfg:?}")));
    }
    // solving in a canonical sample order makes the model independent of input order
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| {
        xs[a]
            .iter()
            .zip(&xs[b])
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(labels[a].value().cmp(&labels[b].value()))
    });
    let xs: Vec<&Vec<f64>> = order.iter().map(|&i| &xs[i]).collect();
    let n = xs.len();
    let y: Vec<f64> = order.iter().map(|&i| labels[i].as_f64()).collect();
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let k = rbf_kernel(cfg.gamma, &xs[i], &xs[j]);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }
    let mut solver = Solver {
        kernel,
        n,
        y: &y,
        c: cfg.c,
        alpha: vec![0.0; n],
        grad: vec![-1.0; n],
    };

    let budget = cfg.max_passes.max(1) * n;
    let mut iterations = 0;
    let (converged, max_violation) = loop {
        let (i, j, gap) = solver.select_pair();
        if gap <= cfg.tol {
            break (true, gap);
        }
        let (Some(i), Some(j)) = (i, j) else {
            break (true, gap);
        };
        if iterations >= budget {
            log::warn!("SMO stopped after {iterations} iterations with violation {gap:.3e}");
            break (false, gap);
        }
        solver.update(i, j);
        iterations += 1;
    };

    let bias = solver.bias();
    let objective = solver.objective();
    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for t in 0..n {
        if solver.alpha[t] > 1e-9 {
            support_vectors.push(xs[t].to_vec());
            coefficients.push(solver.alpha[t] * y[t]);
        }
    }
    Ok(SvmModel {
        support_vectors,
        coefficients,
        bias,
        gamma: cfg.gamma,
        c: cfg.c,
        diagnostics: SvmDiagnostics {
            iterations,
            converged,
            max_violation,
            objective,
        },
    })
}
