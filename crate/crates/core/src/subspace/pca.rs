use serde::{Deserialize, Serialize};

use super::eigen::eig_symmetric;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Eigenvalues below this fraction of the largest are treated as zero.
const NONZERO_REL: f64 = 1e-10;

/// Which eigenvectors of the scatter matrix are kept.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetentionRule {
    /// Smallest leading set whose eigenvalue sum reaches `energy` of the total.
    #[default]
    Cumulative,
    /// Every eigenvector whose own eigenvalue exceeds `energy` of the total
    /// (at least one is always kept).
    Individual,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcaSolver {
    /// Gram matrix when `d > n`, covariance otherwise.
    #[default]
    Auto,
    /// Eigendecompose the `d × d` scatter matrix.
    Covariance,
    /// Eigendecompose the `n × n` inner-product matrix and map back.
    Gram,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaOptions {
    pub energy: f64,
    pub max_dim: Option<usize>,
    pub rule: RetentionRule,
    pub solver: PcaSolver,
}

impl Default for PcaOptions {
    fn default() -> Self {
        PcaOptions {
            energy: 0.999,
            max_dim: None,
            rule: RetentionRule::Cumulative,
            solver: PcaSolver::Auto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `d × k`, orthonormal columns.
    pub basis: Matrix,
    /// Retained eigenvalues, nonincreasing.
    pub eigenvalues: Vec<f64>,
    pub retained_energy: f64,
}

/// Nonzero spectrum of the (unnormalized) scatter matrix with unit
/// eigenvectors in input space, descending.
#[derive(Clone, Debug)]
pub struct ScatterSpectrum {
    pub mean: Vec<f64>,
    pub values: Vec<f64>,
    /// `d × r` for the `r` nonzero eigenvalues.
    pub vectors: Matrix,
    pub total: f64,
}

fn centered(samples: &[Vec<f64>]) -> Result<(Vec<f64>, Matrix)> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let d = samples[0].len();
    if let Some(bad) = samples.iter().find(|s| s.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.len(),
        });
    }
    let mean = linalg::mean_vector(samples);
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| linalg::sub(s, &mean)).collect();
    Ok((mean, Matrix::from_rows(&rows)?))
}

pub fn scatter_spectrum(samples: &[Vec<f64>], solver: PcaSolver) -> Result<ScatterSpectrum> {
    let (mean, xc) = centered(samples)?;
    let (n, d) = (xc.rows(), xc.cols());
    let use_gram = match solver {
        PcaSolver::Auto => d > n,
        PcaSolver::Covariance => false,
        PcaSolver::Gram => true,
    };
    let eig = if use_gram {
        eig_symmetric(&xc.gram_rows())?
    } else {
        eig_symmetric(&xc.gram_cols())?
    };
    let values: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let cutoff = NONZERO_REL * values[0];
    let rank = values.iter().take_while(|&&v| v > cutoff).count();

    let mut vectors = Matrix::zeros(d, rank);
    for j in 0..rank {
        let col = if use_gram {
            let mut v = xc.tr_mul_vec(&eig.vectors.column(j))?;
            let len = linalg::norm(&v);
            v.iter_mut().for_each(|x| *x /= len);
            v
        } else {
            eig.vectors.column(j)
        };
        vectors.set_column(j, &col);
    }
    Ok(ScatterSpectrum {
        mean,
        values: values[..rank].to_vec(),
        vectors,
        total,
    })
}

/// Number of leading components kept under `options`.
pub fn retained_count(values: &[f64], total: f64, options: &PcaOptions) -> usize {
    let k = match options.rule {
        RetentionRule::Cumulative => {
            let target = options.energy * total * (1.0 - 1e-12);
            let mut cum = 0.0;
            values
                .iter()
                .position(|&v| {
                    cum += v;
                    cum >= target
                })
                .map_or(values.len(), |i| i + 1)
        }
        RetentionRule::Individual => values.iter().filter(|&&v| v > options.energy * total).count(),
    };
    let k = k.clamp(1, values.len().max(1));
    options.max_dim.map_or(k, |cap| k.min(cap.max(1)))
}

pub fn pca_fit(samples: &[Vec<f64>], options: &PcaOptions) -> Result<PcaModel> {
    if !(options.energy > 0.0 && options.energy <= 1.0) {
        return Err(Error::UnsupportedConfig(format!(
            "PCA energy must lie in (0, 1], got {}",
            options.energy
        )));
    }
    let spectrum = scatter_spectrum(samples, options.solver)?;
    let k = retained_count(&spectrum.values, spectrum.total, options);
    let d = spectrum.mean.len();
    let basis = Matrix::from_fn(d, k, |i, j| spectrum.vectors[(i, j)]);
    let eigenvalues = spectrum.values[..k].to_vec();
    let retained_energy = eigenvalues.iter().sum::<f64>() / spectrum.total;
    Ok(PcaModel {
        mean: spectrum.mean,
        basis,
        eigenvalues,
        retained_energy,
    })
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.basis.cols()
    }

    /// `basisᵀ (x − mean)`
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: x.len(),
            });
        }
        self.basis.tr_mul_vec(&linalg::sub(x, &self.mean))
    }

    /// `mean + basis · z`
    pub fn reconstruct(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut x = self.basis.mul_vec(z)?;
        linalg::axpy(1.0, &self.mean, &mut x);
        Ok(x)
    }
}

pub fn pca_project(model: &PcaModel, x: &[f64]) -> Result<Vec<f64>> {
    model.project(x)
}
