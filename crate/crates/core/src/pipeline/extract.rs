use serde::{Deserialize, Serialize};

use crate::dataset::{LandmarkSet, Sample};
use crate::error::Result;
use crate::features::{gabor_feature, lbp_feature, lbp_map, GaborBank, GaborBankConfig, LbpConfig};
use crate::preprocess::{
    central_face_rect, equalize_histogram, lower_face_rect, outline_vector, resample_to_grid, to_gray, FaceGrid,
    GrayImage, OutlineFrame,
};

/// Feature-extraction parameters shared by training and prediction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub lbp: LbpConfig,
    pub gabor: GaborBankConfig,
    pub outline_frame: OutlineFrame,
}

/// Grayscale, histogram-equalized image with its landmarks.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub image: GrayImage,
    pub landmarks: LandmarkSet,
}

pub fn prepare(sample: &Sample) -> Prepared {
    Prepared {
        image: equalize_histogram(&to_gray(&sample.image)),
        landmarks: sample.landmarks.clone(),
    }
}

impl Prepared {
    pub fn central_grid(&self) -> Result<FaceGrid> {
        let rect = central_face_rect(&self.landmarks, self.image.width, self.image.height)?;
        resample_to_grid(&self.image.crop(rect)?)
    }

    pub fn lower_grid(&self) -> Result<FaceGrid> {
        let rect = lower_face_rect(&self.landmarks, self.image.width, self.image.height)?;
        resample_to_grid(&self.image.crop(rect)?)
    }
}

/// Builds the four per-framework feature vectors, reusing one Gabor bank.
#[derive(Clone, Debug)]
pub struct Extractor {
    config: ExtractConfig,
    bank: GaborBank,
}

/// Feature vectors for F1..F4 in framework order.
pub type FeatureSet = [Vec<f64>; 4];

impl Extractor {
    pub fn new(config: ExtractConfig) -> Result<Extractor> {
        Ok(Extractor {
            config,
            bank: GaborBank::new(config.gabor)?,
        })
    }

    pub fn config(&self) -> &ExtractConfig {
        &self.config
    }

    pub fn f1(&self, central: &FaceGrid) -> Result<Vec<f64>> {
        Ok(lbp_feature(&lbp_map(central, &self.config.lbp)?))
    }

    pub fn f2(&self, central: &FaceGrid) -> Result<Vec<f64>> {
        Ok(gabor_feature(&self.bank.respond(central)?))
    }

    pub fn f3(&self, lower: &FaceGrid) -> Vec<f64> {
        lower.values().to_vec()
    }

    pub fn f4(&self, prepared: &Prepared) -> Result<Vec<f64>> {
        let rect = central_face_rect(&prepared.landmarks, prepared.image.width, prepared.image.height)?;
        outline_vector(
            &prepared.landmarks,
            (rect.x as f64, rect.y as f64),
            (rect.width as f64, rect.height as f64),
            self.config.outline_frame,
        )
    }

    pub fn extract(&self, sample: &Sample) -> Result<FeatureSet> {
        let prepared = prepare(sample);
        let central = prepared.central_grid()?;
        let lower = prepared.lower_grid()?;
        Ok([
            self.f1(&central)?,
            self.f2(&central)?,
            self.f3(&lower),
            self.f4(&prepared)?,
        ])
    }
}

/// LBP codes of the central face: 784 values.
pub fn extract_f1(sample: &Sample, config: &ExtractConfig) -> Result<Vec<f64>> {
    let central = prepare(sample).central_grid()?;
    Ok(lbp_feature(&lbp_map(&central, &config.lbp)?))
}

/// Gabor magnitudes of the central face: 10800 values.
pub fn extract_f2(sample: &Sample, config: &ExtractConfig) -> Result<Vec<f64>> {
    let central = prepare(sample).central_grid()?;
    Ok(gabor_feature(&GaborBank::new(config.gabor)?.respond(&central)?))
}

/// Lower-face intensities: 900 values.
pub fn extract_f3(sample: &Sample) -> Result<Vec<f64>> {
    Ok(prepare(sample).lower_grid()?.into_values())
}

/// Side-outline coordinates in the central-crop frame: 34 values.
pub fn extract_f4(sample: &Sample, config: &ExtractConfig) -> Result<Vec<f64>> {
    Extractor::new(*config)?.f4(&prepare(sample))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Point, RawImage};
    use crate::preprocess::crop_central_face;
    use crate::synthetic::{generate, SyntheticSpec};

    fn sample() -> Sample {
        generate(&SyntheticSpec { count: 2, ..SyntheticSpec::default() }).remove(0)
    }

    fn constant(sample: &Sample, value: u8) -> Sample {
        let img = RawImage::new(
            sample.image.width,
            sample.image.height,
            1,
            vec![value; sample.image.width * sample.image.height],
        )
        .unwrap();
        Sample::new("c", img, sample.landmarks.clone(), sample.label)
    }

    #[test]
    fn lengths() {
        let s = sample();
        let e = Extractor::new(ExtractConfig::default()).unwrap();
        let f = e.extract(&s).unwrap();
        assert_eq!(f.each_ref().map(Vec::len), [784, 10800, 900, 34]);
    }

    #[test]
    fn free_functions_match_extractor() {
        let s = sample();
        let cfg = ExtractConfig::default();
        let f = Extractor::new(cfg).unwrap().extract(&s).unwrap();
        assert_eq!(extract_f1(&s, &cfg).unwrap(), f[0]);
        assert_eq!(extract_f2(&s, &cfg).unwrap(), f[1]);
        assert_eq!(extract_f3(&s).unwrap(), f[2]);
        assert_eq!(extract_f4(&s, &cfg).unwrap(), f[3]);
    }

    #[test]
    fn stage_by_stage_composition() {
        let s = sample();
        let cfg = ExtractConfig::default();
        let eq = equalize_histogram(&to_gray(&s.image));
        let grid = resample_to_grid(&crop_central_face(&eq, &s.landmarks).unwrap()).unwrap();
        let map = lbp_map(&grid, &cfg.lbp).unwrap();
        assert_eq!(extract_f1(&s, &cfg).unwrap(), lbp_feature(&map));
        let resp = crate::features::gabor_bank(&grid, &cfg.gabor).unwrap();
        assert_eq!(extract_f2(&s, &cfg).unwrap(), gabor_feature(&resp));
        let lower = resample_to_grid(&crate::preprocess::crop_lower_face(&eq, &s.landmarks).unwrap()).unwrap();
        assert_eq!(extract_f3(&s).unwrap(), lower.values());
    }

    #[test]
    fn constant_face() {
        let c = constant(&sample(), 77);
        let cfg = ExtractConfig::default();
        assert!(extract_f1(&c, &cfg).unwrap().iter().all(|&v| v == 8.0));
        assert!(extract_f2(&c, &cfg).unwrap().iter().all(|v| v.abs() < 1e-6));
        let f3 = extract_f3(&c).unwrap();
        assert!(f3.iter().all(|&v| v == f3[0]));
    }

    #[test]
    fn outline_is_translation_invariant_and_hand_normalized() {
        let s = sample();
        let cfg = ExtractConfig::default();
        let base = extract_f4(&s, &cfg).unwrap();
        let shifted = Sample::new("t", s.image.clone(), s.landmarks.translated(3.0, -2.0), s.label);
        let moved = extract_f4(&shifted, &cfg).unwrap();
        for (a, b) in base.iter().zip(&moved) {
            assert!((a - b).abs() < 1e-12);
        }

        let outline = s.landmarks.side_outline();
        let brow_top = s.landmarks.eyebrows().iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let x0 = outline.iter().map(|p| p.x).fold(f64::INFINITY, f64::min).floor();
        let x1 = outline.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max).ceil();
        let y0 = outline.iter().map(|p| p.y).fold(brow_top, f64::min).floor();
        let y1 = outline.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max).ceil();
        let hand: Vec<f64> = outline
            .iter()
            .flat_map(|p: &Point| [(p.x - x0) / (x1 - x0), (p.y - y0) / (y1 - y0)])
            .collect();
        for (a, b) in base.iter().zip(&hand) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
