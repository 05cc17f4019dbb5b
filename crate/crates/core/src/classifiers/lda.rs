use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::label::Label;
use crate::subspace::{default_ridge, lda_direction, scatters, LdaProjection};

/// Fisher projection with a threshold between the projected class means,
/// weighted by the opposite class size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaClassifier {
    pub projection: LdaProjection,
    pub threshold: f64,
}

impl LdaClassifier {
    /// `wᵀx − t`
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        Ok(self.projection.project(x)? - self.threshold)
    }

    pub fn predict(&self, x: &[f64]) -> Result<(Label, f64)> {
        let s = self.decision(x)?;
        Ok((Label::from_score(s), s))
    }
}

/// `ridge = None` uses [`default_ridge`].
pub fn lda_train(xs: &[Vec<f64>], labels: &[Label], ridge: Option<f64>) -> Result<LdaClassifier> {
    let sp = scatters(xs, labels)?;
    let ridge = ridge.unwrap_or_else(|| default_ridge(&sp));
    let projection = lda_direction(&sp, ridge)?;
    let female = projection.project(&sp.class_means[0])?;
    let male = projection.project(&sp.class_means[1])?;
    let [n_f, n_m] = sp.class_sizes.map(|n| n as f64);
    let threshold = (n_f * male + n_m * female) / (n_f + n_m);
    Ok(LdaClassifier { projection, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_fixture_with_midpoint_threshold() {
        let xs = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![5.0, 1.0], vec![7.0, 1.0]];
        let ys = vec![Label::Female, Label::Female, Label::Male, Label::Male];
        let c = lda_train(&xs, &ys, None).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(c.predict(x).unwrap().0, *y);
        }
        let mid = c.projection.project(&[3.5, 0.5]).unwrap();
        assert!((c.threshold - mid).abs() < 1e-12);
    }

    #[test]
    fn vertical_boundary_between_columns() {
        let xs = vec![vec![4.0, 0.0], vec![4.0, 1.0], vec![0.0, 0.0], vec![0.0, 1.0]];
        let ys = vec![Label::Female, Label::Female, Label::Male, Label::Male];
        let c = lda_train(&xs, &ys, None).unwrap();
        let w = &c.projection.direction;
        assert!((w[0] - 1.0).abs() < 1e-9 && w[1].abs() < 1e-5);
        assert!((c.threshold - 2.0).abs() < 1e-5);
        assert_eq!(c.predict(&[3.0, 0.0]).unwrap().0, Label::Female);
        assert_eq!(c.predict(&[1.0, 0.0]).unwrap().0, Label::Male);
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(c.predict(x).unwrap().0, *y);
        }
        let on_plane = LdaClassifier { projection: c.projection.clone(), threshold: 0.0 };
        assert_eq!(on_plane.predict(&[0.0, 0.0]).unwrap(), (Label::Female, 0.0));
    }

    #[test]
    fn whitened_balanced_classes_follow_nearest_mean() {
        // isotropic within-class spread: each class is a unit cross around its mean
        let cross = |cx: f64, cy: f64| vec![vec![cx + 1.0, cy], vec![cx - 1.0, cy], vec![cx, cy + 1.0], vec![cx, cy - 1.0]];
        let mut xs = cross(1.0, 2.0);
        xs.extend(cross(-2.0, 0.5));
        let ys: Vec<Label> = (0..8).map(|i| if i < 4 { Label::Female } else { Label::Male }).collect();
        let c = lda_train(&xs, &ys, None).unwrap();
        let (mf, mm) = ([1.0, 2.0], [-2.0, 0.5]);
        for i in 0..15 {
            for j in 0..15 {
                let p = [-4.0 + 0.5 * i as f64, -3.0 + 0.5 * j as f64];
                let df = crate::linalg::squared_distance(&p, &mf);
                let dm = crate::linalg::squared_distance(&p, &mm);
                if (df - dm).abs() < 1e-6 {
                    continue;
                }
                let nearest = if df < dm { Label::Female } else { Label::Male };
                assert_eq!(c.predict(&p).unwrap().0, nearest, "{p:?}");
            }
        }
    }

    #[test]
    fn unbalanced_threshold_moves_toward_smaller_class() {
        let xs = vec![vec![0.0], vec![0.2], vec![-0.2], vec![4.0]];
        let ys = vec![Label::Female, Label::Female, Label::Female, Label::Male];
        let c = lda_train(&xs, &ys, None).unwrap();
        // w = −1; projected means 0 and −4; t = (3·(−4) + 1·0)/4
        assert_eq!(c.projection.direction, vec![-1.0]);
        assert!((c.threshold + 3.0).abs() < 1e-12);
    }
}
