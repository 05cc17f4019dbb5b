//! Ingestion of images, landmark sidecars and the label manifest.
//!
//! A dataset directory holds `<id>.pgm` (or `<id>.ppm`) images with a
//! `<id>.lmk` landmark sidecar each; a CSV manifest with header `id,label`
//! lists the samples and their labels (`+1` female, `-1` male).

mod landmarks;
mod netpbm;
mod split;

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::label::Label;

pub use landmarks::{
    format_landmarks, load_landmarks, parse_landmarks, LandmarkSet, Point, CHIN, EYEBROWS, EYES,
    LANDMARK_COUNT, LIPS, NOSE, NOSE_TIP, SIDE_OUTLINE,
};
pub use netpbm::{decode, encode, load_image, save_image, RawImage};
pub use split::{split, split_indices, SplitSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub id: String,
    pub image: RawImage,
    pub landmarks: LandmarkSet,
    pub label: Label,
}

impl Sample {
    /// Pairs an image with its landmarks, clamping out-of-bounds points.
    pub fn new(id: impl Into<String>, image: RawImage, mut landmarks: LandmarkSet, label: Label) -> Self {
        let id = id.into();
        let moved = landmarks.clamp_to(image.width, image.height);
        if moved > 0 {
            log::warn!("{id}: clamped {moved} landmark(s) into the image bounds");
        }
        Sample {
            id,
            image,
            landmarks,
            label,
        }
    }
}

#[derive(Debug, Deserialize)]
struct ManifestRow {
    id: String,
    label: String,
}

/// Reads a CSV manifest with a required `id,label` header.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<(String, Label)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_manifest(text: &str) -> Result<Vec<(String, Label)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("manifest header: {e}")))?;
    if headers.iter().collect::<Vec<_>>() != ["id", "label"] {
        return Err(Error::Format(format!(
            "manifest header must be `id,label`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for row in reader.deserialize::<ManifestRow>() {
        let row = row.map_err(|e| Error::Format(format!("manifest: {e}")))?;
        let label = row
            .label
            .parse::<Label>()
            .map_err(|e| Error::Format(format!("manifest row {}: {e}", row.id)))?;
        rows.push((row.id, label));
    }
    Ok(rows)
}

pub fn format_manifest(rows: &[(String, Label)]) -> String {
    let mut out = String::from("id,label\n");
    for (id, label) in rows {
        out.push_str(&format!("{id},{label}\n"));
    }
    out
}

/// Loads `<dir>/<id>.pgm|.ppm` and `<dir>/<id>.lmk`.
pub fn load_sample(dir: impl AsRef<Path>, id: &str, label: Label) -> Result<Sample> {
    let dir = dir.as_ref();
    let pgm = dir.join(format!("{id}.pgm"));
    let image_path = if pgm.exists() { pgm } else { dir.join(format!("{id}.ppm")) };
    let image = load_image(&image_path)?;
    let landmarks = load_landmarks(dir.join(format!("{id}.lmk")))?;
    Ok(Sample::new(id, image, landmarks, label))
}

/// Loads every sample listed in the manifest, in manifest order.
pub fn load_dataset(dir: impl AsRef<Path>, manifest: impl AsRef<Path>) -> Result<Vec<Sample>> {
    use rayon::prelude::*;
    let dir = dir.as_ref();
    load_manifest(manifest)?
        .par_iter()
        .map(|(id, label)| load_sample(dir, id, *label))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_requires_header() {
        let rows = parse_manifest("id,label\na,+1\nb,-1\n").unwrap();
        assert_eq!(rows, vec![("a".into(), Label::Female), ("b".into(), Label::Male)]);
        assert!(parse_manifest("a,+1\nb,-1\n").is_err());
        assert!(parse_manifest("id,label\na,0\n").is_err());
    }

    #[test]
    fn manifest_round_trips() {
        let rows = vec![("x1".to_string(), Label::Male), ("x2".to_string(), Label::Female)];
        assert_eq!(parse_manifest(&format_manifest(&rows)).unwrap(), rows);
    }

    #[test]
    fn loads_sidecars_from_directory() {
        let dir = tempfile::tempdir().unwrap();
        let img = RawImage::new(4, 3, 1, (0..12).collect()).unwrap();
        save_image(&img, dir.path().join("s1.pgm")).unwrap();
        let lmk: String = (0..68).map(|i| format!("{} {}\n", i % 4, 1)).collect();
        std::fs::write(dir.path().join("s1.lmk"), lmk).unwrap();
        std::fs::write(dir.path().join("m.csv"), "id,label\ns1,-1\n").unwrap();
        let samples = load_dataset(dir.path(), dir.path().join("m.csv")).unwrap();
        assert_eq!(samples.len(), 1);
        assert_eq!(samples[0].image, img);
        assert_eq!(samples[0].label, Label::Male);

        std::fs::write(dir.path().join("m.csv"), "id,label\nmissing,-1\n").unwrap();
        assert!(matches!(
            load_dataset(dir.path(), dir.path().join("m.csv")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn sample_clamps_out_of_bounds_landmarks() {
        let img = RawImage::new(10, 10, 1, vec![0; 100]).unwrap();
        let mut pts = vec![Point::new(5.0, 5.0); 68];
        pts[3] = Point::new(12.0, -1.0);
        let s = Sample::new("a", img, LandmarkSet::new(pts).unwrap(), Label::Female);
        assert_eq!(s.landmarks.point(3), Point::new(9.0, 0.0));
    }
}
