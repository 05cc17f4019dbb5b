use serde::{Deserialize, Serialize};

use super::eigen::eig_symmetric;
use crate::error::{Error, Result};
use crate::label::Label;
use crate::linalg::{self, Matrix};

/// Two-class scatter matrices. Index 0 is the `Female` (+1) class.
#[derive(Clone, Debug)]
pub struct ScatterPair {
    pub between: Matrix,
    pub within: Matrix,
    pub class_means: [Vec<f64>; 2],
    /// Mean of the two class means.
    pub grand_mean: Vec<f64>,
    pub class_sizes: [usize; 2],
}

fn class_index(label: Label) -> usize {
    match label {
        Label::Female => 0,
        Label::Male => 1,
    }
}

pub fn scatters(samples: &[Vec<f64>], labels: &[Label]) -> Result<ScatterPair> {
    if samples.len() != labels.len() {
        return Err(Error::LengthMismatch(format!(
            "{} samples but {} labels",
            samples.len(),
            labels.len()
        )));
    }
    let d = samples.first().map_or(0, Vec::len);
    let mut groups: [Vec<&Vec<f64>>; 2] = [Vec::new(), Vec::new()];
    for (x, &l) in samples.iter().zip(labels) {
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        groups[class_index(l)].push(x);
    }
    for (g, label) in groups.iter().zip(Label::BOTH) {
        if g.is_empty() {
            return Err(Error::EmptyClass(label.name()));
        }
    }
    let class_means = [linalg::mean_vector(&groups[0]), linalg::mean_vector(&groups[1])];
    let grand_mean: Vec<f64> = class_means[0]
        .iter()
        .zip(&class_means[1])
        .map(|(a, b)| 0.5 * (a + b))
        .collect();

    let mut between = Matrix::zeros(d, d);
    let mut within = Matrix::zeros(d, d);
    for (g, mu) in groups.iter().zip(&class_means) {
        let dm = linalg::sub(mu, &grand_mean);
        between.add_outer(g.len() as f64, &dm, &dm);
        for x in g {
            let dx = linalg::sub(x, mu);
            within.add_outer(1.0, &dx, &dx);
        }
    }
    Ok(ScatterPair {
        between,
        within,
        class_means,
        grand_mean,
        class_sizes: [groups[0].len(), groups[1].len()],
    })
}

/// `1e-6 · trace(S_w) / d`, or `1e-9` when the within-class scatter vanishes.
pub fn default_ridge(sp: &ScatterPair) -> f64 {
    let d = sp.within.rows().max(1) as f64;
    let r = 1e-6 * sp.within.trace() / d;
    if r > 0.0 {
        r
    } else {
        1e-9
    }
}

/// Unit discriminant direction, oriented so `wᵀ(μ₊ − μ₋) ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaProjection {
    pub direction: Vec<f64>,
}

impl LdaProjection {
    pub fn project(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.direction.len() {
            return Err(Error::DimensionMismatch {
                expected: self.direction.len(),
                got: x.len(),
            });
        }
        Ok(linalg::dot(&self.direction, x))
    }
}

/// Leading eigenvector of `(S_w + ridge·I)⁻¹ S_b`.
///
/// With `S_w + ridge·I = L Lᵀ` the problem is solved as the symmetric
/// eigenproblem of `L⁻¹ S_b L⁻ᵀ`, whose leading vector `v` maps back via
/// `w = L⁻ᵀ v`.
pub fn lda_direction(sp: &ScatterPair, ridge: f64) -> Result<LdaProjection> {
    let diff = linalg::sub(&sp.class_means[0], &sp.class_means[1]);
    let scale = linalg::norm(&sp.class_means[0]) + linalg::norm(&sp.class_means[1]);
    if linalg::norm(&diff) <= 1e-12 * scale {
        return Err(Error::DegenerateDirection);
    }
    let mut regularized = sp.within.clone();
    regularized.add_diagonal(ridge);
    let l = linalg::cholesky(&regularized).ok_or(Error::SingularScatter(ridge))?;

    let d = sp.between.rows();
    // Y = L⁻¹ S_b (column by column), then M = L⁻¹ Yᵀ = L⁻¹ S_b L⁻ᵀ
    let mut y = Matrix::zeros(d, d);
    for j in 0..d {
        y.set_column(j, &linalg::solve_lower(&l, &sp.between.column(j)));
    }
    let yt = y.transpose();
    let mut m = Matrix::zeros(d, d);
    for j in 0..d {
        m.set_column(j, &linalg::solve_lower(&l, &yt.column(j)));
    }
    let m = Matrix::from_fn(d, d, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = eig_symmetric(&m)?;
    if !(eig.values[0] > 0.0) {
        return Err(Error::DegenerateDirection);
    }
    let mut w = linalg::solve_lower_transposed(&l, &eig.vectors.column(0));
    let len = linalg::norm(&w);
    w.iter_mut().for_each(|x| *x /= len);
    if linalg::dot(&w, &diff) < 0.0 {
        w.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(LdaProjection { direction: w })
}
