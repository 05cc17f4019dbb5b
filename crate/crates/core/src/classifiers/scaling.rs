use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Pass features through unchanged.
    None,
    /// Per-feature z-score.
    #[default]
    ZScore,
    /// Per-feature z-score divided by `√d`, so squared distances between
    /// samples are O(1) regardless of dimension.
    ZScoreUnitDistance,
}

/// Affine per-feature map `(x − offset) / scale` fitted on training data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub offset: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(samples: &[Vec<f64>], mode: Scaling) -> Result<Standardizer> {
        let d = samples.first().map_or(0, Vec::len);
        if samples.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
        }
        if mode == Scaling::None {
            return Ok(Standardizer {
                offset: vec![0.0; d],
                scale: vec![1.0; d],
            });
        }
        let mean = linalg::mean_vector(samples);
        let n = samples.len() as f64;
        let dim_factor = if mode == Scaling::ZScoreUnitDistance { (d as f64).sqrt() } else { 1.0 };
        let scale = (0..d)
            .map(|j| {
                let var = samples.iter().map(|s| (s[j] - mean[j]).powi(2)).sum::<f64>() / n;
                let sd = var.sqrt();
                // constant features are centered only
                let sd = if sd > 1e-12 * (1.0 + mean[j].abs()) { sd } else { 1.0 };
                sd * dim_factor
            })
            .collect();
        Ok(Standardizer { offset: mean, scale })
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.offset.len() {
            return Err(Error::DimensionMismatch {
                expected: self.offset.len(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.offset)
            .zip(&self.scale)
            .map(|((v, o), s)| (v - o) / s)
            .collect())
    }

    pub fn transform_all(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        xs.iter().map(|x| self.transform(x)).collect()
    }
}
