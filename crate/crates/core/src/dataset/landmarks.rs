//! 68-point facial landmark sets and the `.lmk` sidecar format.
//!
//! Index layout (the common 68-point convention):
//!
//! | indices | group                                   |
//! |---------|-----------------------------------------|
//! | 0–16    | side outline, left ear → chin → right ear |
//! | 17–26   | eyebrows (5 per side)                   |
//! | 27–35   | nose (27–30 bridge, 30 = tip, 31–35 base) |
//! | 36–47   | eyes (6 per side)                       |
//! | 48–67   | lips and teeth                          |

use std::ops::Range;
use std::path::Path;

use crate::error::{Error, Result};

pub const LANDMARK_COUNT: usize = 68;
pub const SIDE_OUTLINE: Range<usize> = 0..17;
pub const EYEBROWS: Range<usize> = 17..27;
pub const NOSE: Range<usize> = 27..36;
pub const EYES: Range<usize> = 36..48;
pub const LIPS: Range<usize> = 48..68;
pub const CHIN: usize = 8;
pub const NOSE_TIP: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkSet {
    points: Vec<Point>,
}

impl LandmarkSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() != LANDMARK_COUNT {
            return Err(Error::Format(format!(
                "expected {LANDMARK_COUNT} landmarks, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Format(format!("landmark {i} is not finite")));
        }
        Ok(LandmarkSet { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Point {
        self.points[index]
    }

    pub fn side_outline(&self) -> &[Point] {
        &self.points[SIDE_OUTLINE]
    }

    pub fn eyebrows(&self) -> &[Point] {
        &self.points[EYEBROWS]
    }

    pub fn nose(&self) -> &[Point] {
        &self.points[NOSE]
    }

    pub fn eyes(&self) -> &[Point] {
        &self.points[EYES]
    }

    pub fn lips(&self) -> &[Point] {
        &self.points[LIPS]
    }

    pub fn nose_tip(&self) -> Point {
        self.points[NOSE_TIP]
    }

    pub fn chin(&self) -> Point {
        self.points[CHIN]
    }

    /// Clamps every point into `[0, width-1] × [0, height-1]` and returns
    /// how many points moved.
    pub fn clamp_to(&mut self, width: usize, height: usize) -> usize {
        let max_x = width.saturating_sub(1) as f64;
        let max_y = height.saturating_sub(1) as f64;
        let mut moved = 0;
        for p in &mut self.points {
            let q = Point::new(p.x.clamp(0.0, max_x), p.y.clamp(0.0, max_y));
            if q != *p {
                moved += 1;
                *p = q;
            }
        }
        moved
    }

    pub fn translated(&self, dx: f64, dy: f64) -> LandmarkSet {
        LandmarkSet {
            points: self.points.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect(),
        }
    }
}

pub fn parse_landmarks(text: &str) -> Result<LandmarkSet> {
    let mut points = Vec::with_capacity(LANDMARK_COUNT);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut coord = |axis: &str| -> Result<f64> {
            fields
                .next()
                .ok_or_else(|| Error::Format(format!("line {}: missing {axis}", lineno + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("line {}: bad {axis}: {e}", lineno + 1)))
        };
        let x = coord("x")?;
        let y = coord("y")?;
        if fields.next().is_some() {
            return Err(Error::Format(format!(
                "line {}: expected exactly two fields",
                lineno + 1
            )));
        }
        points.push(Point::new(x, y));
    }
    LandmarkSet::new(points)
}

pub fn load_landmarks(path: impl AsRef<Path>) -> Result<LandmarkSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_landmarks(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn format_landmarks(lm: &LandmarkSet) -> String {
    lm.points.iter().map(|p| format!("{} {}\n", p.x, p.y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numbered() -> String {
        (0..68).map(|i| format!("{i} {i}.5\n")).collect()
    }

    #[test]
    fn parses_in_file_order() {
        let lm = parse_landmarks(&numbered()).unwrap();
        assert_eq!(lm.point(10), Point::new(10.0, 10.5));
        assert_eq!(lm.side_outline().len(), 17);
        assert_eq!(lm.side_outline()[16], Point::new(16.0, 16.5));
        assert_eq!(lm.eyebrows()[0], Point::new(17.0, 17.5));
        assert_eq!(lm.nose_tip(), Point::new(30.0, 30.5));
        assert_eq!(lm.chin(), Point::new(8.0, 8.5));
    }

    #[test]
    fn wrong_count_is_format_error() {
        let text: String = (0..67).map(|i| format!("{i} {i}\n")).collect();
        assert!(matches!(parse_landmarks(&text), Err(Error::Format(_))));
    }

    #[test]
    fn non_numeric_is_format_error() {
        let text = numbered().replacen("3 3.5", "3 abc", 1);
        assert!(matches!(parse_landmarks(&text), Err(Error::Format(_))));
        let text = numbered().replacen("3 3.5", "3 3.5 1", 1);
        assert!(parse_landmarks(&text).is_err());
        let text = numbered().replacen("3 3.5", "NaN 1", 1);
        assert!(parse_landmarks(&text).is_err());
    }

    #[test]
    fn format_round_trips() {
        let lm = parse_landmarks(&numbered()).unwrap();
        assert_eq!(parse_landmarks(&format_landmarks(&lm)).unwrap(), lm);
    }

    #[test]
    fn clamping_counts_moved_points() {
        let mut pts: Vec<Point> = (0..68).map(|i| Point::new(i as f64, 5.0)).collect();
        pts[0] = Point::new(-3.0, 5.0);
        pts[1] = Point::new(5.0, 200.0);
        let mut lm = LandmarkSet::new(pts).unwrap();
        let moved = lm.clamp_to(50, 100);
        // points 0, 1 and 50..=67 fall outside a 50-wide image
        assert_eq!(moved, 2 + 18);
        assert_eq!(lm.point(0), Point::new(0.0, 5.0));
        assert_eq!(lm.point(1), Point::new(5.0, 99.0));
        assert_eq!(lm.point(67), Point::new(49.0, 5.0));
    }
}
