//! Seeded generator of labelled synthetic faces with 68-point landmarks.
//!
//! The two classes differ in jaw shape (width, length and squareness of the
//! outline) and in the roughness of the skin texture below the nose.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{format_landmarks, format_manifest, save_image, LandmarkSet, Point, RawImage, Sample};
use crate::error::{Error, Result};
use crate::label::Label;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub count: usize,
    pub seed: u64,
    pub width: usize,
    pub height: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            count: 200,
            seed: 7,
            width: 128,
            height: 160,
        }
    }
}

/// Per-face geometry and texture parameters.
#[derive(Clone, Copy, Debug)]
struct Face {
    cx: f64,
    cy: f64,
    /// Jaw half-width.
    a: f64,
    /// Jaw depth below the eye line.
    b: f64,
    /// Superellipse exponent of the jaw; larger is squarer.
    squareness: f64,
    roughness: f64,
    skin: f64,
    background: f64,
}

fn jitter(rng: &mut ChaCha8Rng, mean: f64, spread: f64) -> f64 {
    mean + rng.gen_range(-spread..=spread)
}

fn sample_face(rng: &mut ChaCha8Rng, label: Label, spec: &SyntheticSpec) -> Face {
    let (a, b, squareness, roughness) = match label {
        Label::Male => (43.0, 55.0, 2.3, 15.0),
        Label::Female => (40.0, 58.0, 2.0, 8.0),
    };
    Face {
        cx: jitter(rng, spec.width as f64 / 2.0, 4.0),
        cy: jitter(rng, spec.height as f64 * 0.45, 4.0),
        a: jitter(rng, a, 3.0),
        b: jitter(rng, b, 3.0),
        squareness: jitter(rng, squareness, 0.25),
        roughness: jitter(rng, roughness, 4.0),
        skin: jitter(rng, 165.0, 20.0),
        background: jitter(rng, 60.0, 20.0),
    }
}

fn ellipse_points(cx: f64, cy: f64, rx: f64, ry: f64, angles: &[f64]) -> Vec<Point> {
    angles.iter().map(|t| Point::new(cx + rx * t.cos(), cy - ry * t.sin())).collect()
}

fn landmarks(f: &Face) -> LandmarkSet {
    let mut pts = Vec::with_capacity(68);
    let e = 2.0 / f.squareness;
    for k in 0..17 {
        let t = PI * k as f64 / 16.0;
        let (c, s) = (t.cos(), t.sin());
        let x = f.cx - f.a * c.signum() * c.abs().powf(e);
        pts.push(Point::new(x, f.cy + f.b * s.abs().powf(e)));
    }
    let brow_y = f.cy - 28.0;
    for side in [-1.0, 1.0] {
        for i in 0..5 {
            let u = i as f64 / 4.0;
            let x = if side < 0.0 { f.cx - f.a * (0.75 - 0.6 * u) } else { f.cx + f.a * (0.15 + 0.6 * u) };
            pts.push(Point::new(x, brow_y - 3.0 * (PI * u).sin()));
        }
    }
    for i in 0..4 {
        pts.push(Point::new(f.cx, f.cy - 18.0 + 26.0 * i as f64 / 3.0));
    }
    for i in 0..5 {
        pts.push(Point::new(f.cx - 8.0 + 4.0 * i as f64, f.cy + 12.0));
    }
    let eye_angles = [PI, 0.75 * PI, 0.25 * PI, 0.0, -0.25 * PI, -0.75 * PI];
    for side in [-1.0, 1.0] {
        pts.extend(ellipse_points(f.cx + side * 0.42 * f.a, f.cy - 16.0, 7.0, 3.0, &eye_angles));
    }
    let mouth_y = f.cy + 0.6 * f.b;
    let outer: Vec<f64> = (0..12)
        .map(|i| if i <= 6 { PI - PI * i as f64 / 6.0 } else { -PI * (i - 6) as f64 / 6.0 })
        .collect();
    pts.extend(ellipse_points(f.cx, mouth_y, 16.0, 6.0, &outer));
    let inner: Vec<f64> = (0..8)
        .map(|i| if i <= 4 { PI - PI * i as f64 / 4.0 } else { -PI * (i - 4) as f64 / 4.0 })
        .collect();
    pts.extend(ellipse_points(f.cx, mouth_y, 10.0, 2.0, &inner));
    LandmarkSet::new(pts).expect("68 finite points")
}

fn segment_distance(p: (f64, f64), a: &Point, b: &Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.0 - a.x) * dx + (p.1 - a.y) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    ((p.0 - a.x - t * dx).powi(2) + (p.1 - a.y - t * dy).powi(2)).sqrt()
}

fn render(f: &Face, lm: &LandmarkSet, spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> RawImage {
    let fine = Normal::new(0.0, 4.0).expect("positive deviation");
    let rough = Normal::new(0.0, f.roughness).expect("positive deviation");
    let tip_y = lm.nose_tip().y;
    let mouth = (f.cx, f.cy + 0.6 * f.b);
    let brows = lm.eyebrows();
    let mut data = Vec::with_capacity(spec.width * spec.height);
    for y in 0..spec.height {
        for x in 0..spec.width {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let dx = (px - f.cx) / f.a;
            let dy = (py - f.cy) / f.b;
            let inside = if py >= f.cy {
                dx.abs().powf(f.squareness) + dy.abs().powf(f.squareness) <= 1.0
            } else {
                dx * dx + ((py - f.cy) / 50.0).powi(2) <= 1.0
            };
            let mut v = if inside {
                let shade = f.skin - 12.0 * dx * dx;
                let texture = if py > tip_y { rough.sample(rng) } else { fine.sample(rng) };
                shade + texture
            } else {
                f.background + fine.sample(rng)
            };
            if inside {
                let on_brow = brows
                    .windows(2)
                    .filter(|w| (w[0].x - w[1].x).abs() < 20.0)
                    .any(|w| segment_distance((px, py), &w[0], &w[1]) <= 1.8);
                let in_eye = [-1.0, 1.0].iter().any(|s| {
                    let ex = (px - (f.cx + s * 0.42 * f.a)) / 7.0;
                    let ey = (py - (f.cy - 16.0)) / 3.0;
                    ex * ex + ey * ey <= 1.0
                });
                let in_nostril = [-1.0, 1.0].iter().any(|s| (px - (f.cx + s * 4.0)).hypot(py - (f.cy + 12.0)) <= 1.5);
                let (mx, my) = ((px - mouth.0) / 16.0, (py - mouth.1) / 6.0);
                if on_brow {
                    v = 0.35 * v;
                } else if in_eye || in_nostril {
                    v = 30.0;
                } else if mx * mx + my * my <= 1.0 {
                    v = 0.65 * v;
                }
            }
            data.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    RawImage::new(spec.width, spec.height, 1, data).expect("buffer matches dimensions")
}

/// `count` faces with alternating labels, starting with `Female`.
pub fn generate(spec: &SyntheticSpec) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Female } else { Label::Male };
            let face = sample_face(&mut rng, label, spec);
            let lm = landmarks(&face);
            let image = render(&face, &lm, spec, &mut rng);
            Sample::new(format!("s{i:04}"), image, lm, label)
        })
        .collect()
}

/// Writes `<id>.pgm`, `<id>.lmk` and `manifest.csv` into `dir`.
pub fn write_dataset(dir: impl AsRef<Path>, samples: &[Sample]) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for s in samples {
        save_image(&s.image, dir.join(format!("{}.pgm", s.id)))?;
        let path = dir.join(format!("{}.lmk", s.id));
        std::fs::write(&path, format_landmarks(&s.landmarks)).map_err(|e| Error::io(&path, e))?;
    }
    let rows: Vec<(String, Label)> = samples.iter().map(|s| (s.id.clone(), s.label)).collect();
    let path = dir.join("manifest.csv");
    std::fs::write(&path, format_manifest(&rows)).map_err(|e| Error::io(&path, e))
}
