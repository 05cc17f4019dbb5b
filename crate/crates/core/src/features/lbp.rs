//! Uniform local binary patterns on the 30×30 face grid.
//!
//! Bit `p` of the raw code compares neighbor `p` against the center, with
//! neighbors enumerated counterclockwise from the right-hand pixel (image
//! rows grow downward):
//!
//! ```text
//! 3 2 1
//! 4 c 0
//! 5 6 7
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{FaceGrid, GRID_SIZE};

/// Non-uniform label for eight neighbors (`P + 1`).
pub const NON_UNIFORM: u8 = 9;

/// `(dx, dy)` of neighbor `p`.
pub const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LbpConfig {
    pub neighbors: usize,
    pub radius: usize,
    pub step: usize,
}

impl Default for LbpConfig {
    fn default() -> Self {
        LbpConfig {
            neighbors: 8,
            radius: 1,
            step: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LbpCode {
    pub raw: u8,
    pub uniform: u8,
}

/// Number of circular 0↔1 transitions in an 8-bit pattern.
pub fn transitions(pattern: u8) -> u32 {
    (pattern ^ pattern.rotate_right(1)).count_ones()
}

/// Uniform label of a raw pattern: its popcount when it has at most two
/// transitions, `NON_UNIFORM` otherwise.
pub fn uniform_label(pattern: u8) -> u8 {
    if transitions(pattern) <= 2 {
        pattern.count_ones() as u8
    } else {
        NON_UNIFORM
    }
}

pub fn lbp_code(center: f64, neighbors: [f64; 8]) -> LbpCode {
    let raw = neighbors
        .iter()
        .enumerate()
        .fold(0u8, |acc, (p, &g)| if g - center >= 0.0 { acc | (1 << p) } else { acc });
    LbpCode {
        raw,
        uniform: uniform_label(raw),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LbpMap {
    pub rows: usize,
    pub cols: usize,
    pub codes: Vec<u8>,
}

impl LbpMap {
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.codes[row * self.cols + col]
    }

    /// Row-major flattening of the code map.
    pub fn to_feature(&self) -> Vec<f64> {
        self.codes.iter().map(|&c| f64::from(c)).collect()
    }

    pub fn from_feature(rows: usize, cols: usize, feature: &[f64]) -> Result<LbpMap> {
        if feature.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: feature.len(),
            });
        }
        Ok(LbpMap {
            rows,
            cols,
            codes: feature.iter().map(|&v| v as u8).collect(),
        })
    }
}

/// Uniform-LBP codes for every grid pixel with a complete neighbor ring,
/// visited with the configured step (28×28 for step 1).
pub fn lbp_map(grid: &FaceGrid, cfg: &LbpConfig) -> Result<LbpMap> {
    if cfg.neighbors != 8 || cfg.radius != 1 {
        return Err(Error::UnsupportedConfig(format!(
            "uniform LBP supports 8 neighbors at radius 1, got P={} R={}",
            cfg.neighbors, cfg.radius
        )));
    }
    if cfg.step == 0 {
        return Err(Error::UnsupportedConfig("LBP step must be positive".into()));
    }
    let centers: Vec<usize> = (1..GRID_SIZE - 1).step_by(cfg.step).collect();
    let mut codes = Vec::with_capacity(centers.len() * centers.len());
    for &r in &centers {
        for &c in &centers {
            let mut ring = [0.0; 8];
            for (g, (dx, dy)) in ring.iter_mut().zip(NEIGHBOR_OFFSETS) {
                *g = grid.get((r as isize + dy) as usize, (c as isize + dx) as usize);
            }
            codes.push(lbp_code(grid.get(r, c), ring).uniform);
        }
    }
    Ok(LbpMap {
        rows: centers.len(),
        cols: centers.len(),
        codes,
    })
}

pub fn lbp_feature(map: &LbpMap) -> Vec<f64> {
    map.to_feature()
}
