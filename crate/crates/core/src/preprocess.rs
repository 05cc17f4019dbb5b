//! Grayscale conversion, histogram equalization, landmark-driven crops and
//! resampling onto the fixed 30×30 face grid.

use serde::{Deserialize, Serialize};

use crate::dataset::{LandmarkSet, Point, RawImage};
use crate::error::{Error, Result};

/// Side length of the resampled face grid.
pub const GRID_SIZE: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                got: data.len(),
            });
        }
        Ok(GrayImage { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        GrayImage { width, height, data }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn into_raw(self) -> RawImage {
        RawImage {
            width: self.width,
            height: self.height,
            channels: 1,
            data: self.data,
        }
    }

    pub fn crop(&self, rect: Rect) -> Result<GrayImage> {
        if rect.width == 0 || rect.height == 0 {
            return Err(Error::DegenerateRegion(format!("{rect:?} has zero area")));
        }
        if rect.x + rect.width > self.width || rect.y + rect.height > self.height {
            return Err(Error::DegenerateRegion(format!(
                "{rect:?} exceeds {}x{} image",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(rect.width * rect.height);
        for y in rect.y..rect.y + rect.height {
            let start = y * self.width + rect.x;
            data.extend_from_slice(&self.data[start..start + rect.width]);
        }
        Ok(GrayImage {
            width: rect.width,
            height: rect.height,
            data,
        })
    }
}

/// Pixel rectangle `[x, x+width) × [y, y+height)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    /// Smallest pixel rectangle covering `[min_x, max_x] × [min_y, max_y]`,
    /// clamped to a `width × height` image.
    fn covering(min_x: f64, max_x: f64, min_y: f64, max_y: f64, width: usize, height: usize) -> Result<Rect> {
        let x0 = min_x.floor().clamp(0.0, width as f64) as usize;
        let x1 = max_x.ceil().clamp(0.0, width as f64) as usize;
        let y0 = min_y.floor().clamp(0.0, height as f64) as usize;
        let y1 = max_y.ceil().clamp(0.0, height as f64) as usize;
        if x1 <= x0 || y1 <= y0 {
            return Err(Error::DegenerateRegion(format!(
                "region [{min_x}, {max_x}] x [{min_y}, {max_y}] has zero area"
            )));
        }
        Ok(Rect {
            x: x0,
            y: y0,
            width: x1 - x0,
            height: y1 - y0,
        })
    }
}

/// 30×30 resampled intensities, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceGrid {
    values: Vec<f64>,
}

impl FaceGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != GRID_SIZE * GRID_SIZE {
            return Err(Error::DimensionMismatch {
                expected: GRID_SIZE * GRID_SIZE,
                got: values.len(),
            });
        }
        Ok(FaceGrid { values })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(GRID_SIZE * GRID_SIZE);
        for row in 0..GRID_SIZE {
            for col in 0..GRID_SIZE {
                values.push(f(row, col));
            }
        }
        FaceGrid { values }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * GRID_SIZE + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

pub fn to_gray(img: &RawImage) -> GrayImage {
    let data = match img.channels {
        1 => img.data.clone(),
        _ => img
            .data
            .chunks_exact(3)
            .map(|px| {
                let luma = 0.299 * f64::from(px[0]) + 0.587 * f64::from(px[1]) + 0.114 * f64::from(px[2]);
                luma.round().clamp(0.0, 255.0) as u8
            })
            .collect(),
    };
    GrayImage {
        width: img.width,
        height: img.height,
        data,
    }
}

/// CDF histogram equalization,
/// `out(v) = round(255 · (cdf(v) − cdf_min) / (N − cdf_min))`.
/// A single-level image is returned unchanged.
pub fn equalize_histogram(img: &GrayImage) -> GrayImage {
    let mut hist = [0usize; 256];
    for &v in &img.data {
        hist[v as usize] += 1;
    }
    let mut cdf = [0usize; 256];
    let mut running = 0;
    for (c, h) in cdf.iter_mut().zip(hist) {
        running += h;
        *c = running;
    }
    let n = img.data.len();
    let cdf_min = hist
        .iter()
        .zip(cdf)
        .find(|(h, _)| **h > 0)
        .map_or(0, |(_, c)| c);
    if n == cdf_min {
        return img.clone();
    }
    let denom = (n - cdf_min) as f64;
    let lut: Vec<u8> = cdf
        .iter()
        .map(|&c| (255.0 * c.saturating_sub(cdf_min) as f64 / denom).round() as u8)
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&v| lut[v as usize]).collect(),
    }
}

fn bounds(points: &[Point]) -> (f64, f64, f64, f64) {
    points.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(x0, x1, y0, y1), p| (x0.min(p.x), x1.max(p.x), y0.min(p.y), y1.max(p.y)),
    )
}

/// Bounding box of the side outline, with its top raised to the highest
/// eyebrow point so the forehead is kept while hair beside the outline is not.
pub fn central_face_rect(lm: &LandmarkSet, width: usize, height: usize) -> Result<Rect> {
    let (min_x, max_x, min_y, max_y) = bounds(lm.side_outline());
    if max_x <= min_x || max_y <= min_y {
        return Err(Error::DegenerateRegion("side outline spans no area".into()));
    }
    let (_, _, brow_top, _) = bounds(lm.eyebrows());
    Rect::covering(min_x, max_x, min_y.min(brow_top), max_y, width, height)
}

pub fn crop_central_face(img: &GrayImage, lm: &LandmarkSet) -> Result<GrayImage> {
    img.crop(central_face_rect(lm, img.width, img.height)?)
}

/// Nose tip to chin vertically; horizontally between the outline points on
/// each side of the jaw whose height is nearest the nose tip.
pub fn lower_face_rect(lm: &LandmarkSet, width: usize, height: usize) -> Result<Rect> {
    let tip = lm.nose_tip();
    let chin = lm.chin();
    if tip.y >= chin.y {
        return Err(Error::DegenerateRegion(format!(
            "nose tip (y={}) is not above the chin (y={})",
            tip.y, chin.y
        )));
    }
    let outline = lm.side_outline();
    let nearest = |side: &[Point]| -> Point {
        *side
            .iter()
            .min_by(|a, b| (a.y - tip.y).abs().total_cmp(&(b.y - tip.y).abs()))
            .expect("outline halves are nonempty")
    };
    let left = nearest(&outline[..8]);
    let right = nearest(&outline[9..]);
    Rect::covering(left.x.min(right.x), left.x.max(right.x), tip.y, chin.y, width, height)
}

pub fn crop_lower_face(img: &GrayImage, lm: &LandmarkSet) -> Result<GrayImage> {
    img.crop(lower_face_rect(lm, img.width, img.height)?)
}

/// Corner-aligned bilinear resampling of a real-valued `width × height`
/// buffer onto an `out_w × out_h` lattice.
pub fn resample_bilinear(src: &[f64], width: usize, height: usize, out_w: usize, out_h: usize) -> Result<Vec<f64>> {
    if width < 2 || height < 2 {
        return Err(Error::DegenerateRegion(format!(
            "cannot resample a {width}x{height} region"
        )));
    }
    if src.len() != width * height {
        return Err(Error::DimensionMismatch {
            expected: width * height,
            got: src.len(),
        });
    }
    let coord = |i: usize, out: usize, size: usize| -> (usize, f64) {
        let pos = if out > 1 {
            (i * (size - 1)) as f64 / (out - 1) as f64
        } else {
            0.0
        };
        let base = (pos.floor() as usize).min(size - 2);
        (base, pos - base as f64)
    };
    let mut out = Vec::with_capacity(out_w * out_h);
    for r in 0..out_h {
        let (y0, fy) = coord(r, out_h, height);
        for c in 0..out_w {
            let (x0, fx) = coord(c, out_w, width);
            let a = src[y0 * width + x0];
            let b = src[y0 * width + x0 + 1];
            let d = src[(y0 + 1) * width + x0];
            let e = src[(y0 + 1) * width + x0 + 1];
            let top = (1.0 - fx) * a + fx * b;
            let bottom = (1.0 - fx) * d + fx * e;
            out.push((1.0 - fy) * top + fy * bottom);
        }
    }
    Ok(out)
}

pub fn resample_to_grid(img: &GrayImage) -> Result<FaceGrid> {
    let src: Vec<f64> = img.data.iter().map(|&v| f64::from(v)).collect();
    let values = resample_bilinear(&src, img.width, img.height, GRID_SIZE, GRID_SIZE)?;
    Ok(FaceGrid {
        values: values.into_iter().map(|v| v.clamp(0.0, 255.0)).collect(),
    })
}

/// How side-outline coordinates are expressed in the geometric feature.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlineFrame {
    /// Translated by the crop origin and scaled by the crop size into [0,1]².
    #[default]
    CropBox,
    /// Raw image pixel coordinates.
    Raw,
}

/// The 17 side-outline points as `x₁, y₁, …, x₁₇, y₁₇`.
pub fn outline_vector(lm: &LandmarkSet, origin: (f64, f64), size: (f64, f64), frame: OutlineFrame) -> Result<Vec<f64>> {
    if !(size.0 > 0.0 && size.1 > 0.0) {
        return Err(Error::DegenerateRegion(format!(
            "crop size {}x{} is not positive",
            size.0, size.1
        )));
    }
    Ok(lm
        .side_outline()
        .iter()
        .flat_map(|p| match frame {
            OutlineFrame::CropBox => [(p.x - origin.0) / size.0, (p.y - origin.1) / size.1],
            OutlineFrame::Raw => [p.x, p.y],
        })
        .collect())
}
