//! Gabor kernels and the 3-scale × 4-orientation filter bank.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{FaceGrid, GRID_SIZE};

pub const BANK_WAVELENGTHS: [f64; 3] = [2.0, 5.0, 8.0];
pub const BANK_ORIENTATIONS_DEG: [f64; 4] = [0.0, 45.0, 90.0, 135.0];
pub const BANK_SIZE: usize = BANK_WAVELENGTHS.len() * BANK_ORIENTATIONS_DEG.len();

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaborParams {
    pub wavelength: f64,
    pub orientation: f64,
    pub phase: f64,
    pub sigma: f64,
}

impl GaborParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0 && self.sigma > 0.0) {
            return Err(Error::UnsupportedConfig(format!(
                "gabor wavelength and sigma must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Square kernel sampled at integer offsets `-half..=half`, row-major with
/// rows indexed by `y` and columns by `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub half: usize,
    pub values: Vec<f64>,
}

impl Kernel {
    pub fn side(&self) -> usize {
        2 * self.half + 1
    }

    pub fn at(&self, x: isize, y: isize) -> f64 {
        let h = self.half as isize;
        self.values[((y + h) * (2 * h + 1) + (x + h)) as usize]
    }
}

fn envelope(x: f64, y: f64, sigma: f64) -> f64 {
    (-(x * x + y * y) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
}

/// `g(x, y) = 1/(2πσ²) · exp(−(x²+y²)/2σ²) · sin(2πx′/λ + φ)`,
/// `x′ = x cos θ + y sin θ`.
pub fn gabor_value(p: &GaborParams, x: f64, y: f64) -> f64 {
    let rotated = x * p.orientation.cos() + y * p.orientation.sin();
    envelope(x, y, p.sigma) * (2.0 * PI * rotated / p.wavelength + p.phase).sin()
}

pub fn gabor_kernel(p: &GaborParams, support: usize) -> Result<Kernel> {
    p.validate()?;
    if support == 0 {
        return Err(Error::UnsupportedConfig("kernel support must be at least 1".into()));
    }
    let h = support as isize;
    let mut values = Vec::with_capacity((2 * support + 1).pow(2));
    for y in -h..=h {
        for x in -h..=h {
            values.push(gabor_value(p, x as f64, y as f64));
        }
    }
    Ok(Kernel { half: support, values })
}

/// Even (cosine-phase) companion of a kernel, with its DC response removed
/// by subtracting a matching multiple of the Gaussian envelope.
fn zero_mean_even_kernel(p: &GaborParams, support: usize) -> Result<Kernel> {
    let even = GaborParams { phase: p.phase + PI / 2.0, ..*p };
    let mut k = gabor_kernel(&even, support)?;
    let h = support as isize;
    let env: Vec<f64> = (-h..=h)
        .flat_map(|y| (-h..=h).map(move |x| envelope(x as f64, y as f64, p.sigma)))
        .collect();
    let ratio = k.values.iter().sum::<f64>() / env.iter().sum::<f64>();
    for (v, e) in k.values.iter_mut().zip(env) {
        *v -= ratio * e;
    }
    Ok(k)
}

/// Mirror index with edge repetition: `-1 → 0`, `n → n-1`.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let m = i.rem_euclid(2 * n);
    (if m >= n { 2 * n - 1 - m } else { m }) as usize
}

/// Same-size 2-D convolution, `out(r, c) = Σ k(u, v) · src(r − v, c − u)`,
/// with symmetric reflection at the borders.
pub fn convolve_same(src: &[f64], width: usize, height: usize, kernel: &Kernel) -> Result<Vec<f64>> {
    if src.len() != width * height {
        return Err(Error::DimensionMismatch {
            expected: width * height,
            got: src.len(),
        });
    }
    let h = kernel.half as isize;
    let side = kernel.side();
    let mut out = vec![0.0; width * height];
    // tabulated reflected coordinates for every row/column a tap can reach
    let cols: Vec<usize> = (-h..width as isize + h).map(|c| reflect(c, width)).collect();
    let rows: Vec<usize> = (-h..height as isize + h).map(|r| reflect(r, height)).collect();
    for r in 0..height {
        for c in 0..width {
            let mut acc = 0.0;
            for (ky, krow) in kernel.values.chunks_exact(side).enumerate() {
                // source row r - (ky - h), shifted by h into the table
                let sr = rows[r + 2 * kernel.half - ky];
                let src_row = &src[sr * width..(sr + 1) * width];
                for (kx, &k) in krow.iter().enumerate() {
                    acc += k * src_row[cols[c + 2 * kernel.half - kx]];
                }
            }
            out[r * width + c] = acc;
        }
    }
    Ok(out)
}

/// How a filter response is turned into a nonnegative magnitude.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaborMagnitude {
    /// `sqrt(odd² + even²)` over the sine-phase kernel and its zero-mean
    /// cosine-phase companion.
    #[default]
    Quadrature,
    /// `|odd|`: absolute value of the single sine-phase response.
    OddPhase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaborBankConfig {
    /// σ = `sigma_ratio` · λ.
    pub sigma_ratio: f64,
    /// Kernel half-width = ceil(`support_sigmas` · σ).
    pub support_sigmas: f64,
    pub magnitude: GaborMagnitude,
}

impl Default for GaborBankConfig {
    fn default() -> Self {
        GaborBankConfig {
            sigma_ratio: 0.56,
            support_sigmas: 2.5,
            magnitude: GaborMagnitude::default(),
        }
    }
}

impl GaborBankConfig {
    /// Bank filters in scale-major, orientation-minor order.
    pub fn filters(&self) -> Vec<GaborParams> {
        BANK_WAVELENGTHS
            .iter()
            .flat_map(|&wavelength| {
                BANK_ORIENTATIONS_DEG.iter().map(move |&deg| GaborParams {
                    wavelength,
                    orientation: deg.to_radians(),
                    phase: 0.0,
                    sigma: self.sigma_ratio * wavelength,
                })
            })
            .collect()
    }

    pub fn support(&self, sigma: f64) -> usize {
        ((self.support_sigmas * sigma).ceil() as usize).max(1)
    }
}

/// Twelve nonnegative 30×30 magnitude maps.
#[derive(Clone, Debug, PartialEq)]
pub struct GaborBankResponse {
    pub magnitudes: Vec<Vec<f64>>,
}

impl GaborBankResponse {
    pub fn mean_magnitudes(&self) -> Vec<f64> {
        self.magnitudes
            .iter()
            .map(|m| m.iter().sum::<f64>() / m.len() as f64)
            .collect()
    }
}

/// Precomputed kernels for one bank configuration.
#[derive(Clone, Debug)]
pub struct GaborBank {
    config: GaborBankConfig,
    odd: Vec<Kernel>,
    even: Vec<Kernel>,
}

impl GaborBank {
    pub fn new(config: GaborBankConfig) -> Result<Self> {
        let mut odd = Vec::with_capacity(BANK_SIZE);
        let mut even = Vec::new();
        for p in config.filters() {
            let support = config.support(p.sigma);
            odd.push(gabor_kernel(&p, support)?);
            if config.magnitude == GaborMagnitude::Quadrature {
                even.push(zero_mean_even_kernel(&p, support)?);
            }
        }
        Ok(GaborBank { config, odd, even })
    }

    pub fn config(&self) -> &GaborBankConfig {
        &self.config
    }

    pub fn odd_kernels(&self) -> &[Kernel] {
        &self.odd
    }

    /// Magnitude maps for a `width × height` real image.
    pub fn apply(&self, src: &[f64], width: usize, height: usize) -> Result<GaborBankResponse> {
        let mut magnitudes = Vec::with_capacity(BANK_SIZE);
        for (i, odd) in self.odd.iter().enumerate() {
            let o = convolve_same(src, width, height, odd)?;
            let m = match self.config.magnitude {
                GaborMagnitude::OddPhase => o.into_iter().map(f64::abs).collect(),
                GaborMagnitude::Quadrature => {
                    let e = convolve_same(src, width, height, &self.even[i])?;
                    o.iter().zip(e).map(|(a, b)| a.hypot(b)).collect()
                }
            };
            magnitudes.push(m);
        }
        Ok(GaborBankResponse { magnitudes })
    }

    pub fn respond(&self, grid: &FaceGrid) -> Result<GaborBankResponse> {
        self.apply(grid.values(), GRID_SIZE, GRID_SIZE)
    }
}

pub fn gabor_bank(grid: &FaceGrid, config: &GaborBankConfig) -> Result<GaborBankResponse> {
    GaborBank::new(*config)?.respond(grid)
}

/// Concatenation of the row-major magnitude maps in bank order.
pub fn gabor_feature(resp: &GaborBankResponse) -> Vec<f64> {
    resp.magnitudes.iter().flatten().copied().collect()
}
