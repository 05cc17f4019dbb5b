use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Label;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.75,
            seed: 0,
            stratified: true,
        }
    }
}

/// Index-level split: returns `(train, test)` positions into `labels`,
/// each sorted ascending.
pub fn split_indices(labels: &[Label], spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::UnsupportedConfig(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let groups: Vec<Vec<usize>> = if spec.stratified {
        Label::BOTH
            .iter()
            .map(|&class| {
                let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
                if members.len() < 2 {
                    return Err(Error::InsufficientData(format!(
                        "class {class} has {} samples, stratified split needs at least 2",
                        members.len()
                    )));
                }
                Ok(members)
            })
            .collect::<Result<_>>()?
    } else {
        if labels.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "{} samples cannot be split",
                labels.len()
            )));
        }
        vec![(0..labels.len()).collect()]
    };

    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut group in groups {
        group.shuffle(&mut rng);
        let n = group.len();
        let n_train = ((spec.train_fraction * n as f64).round() as usize).clamp(1, n - 1);
        train.extend_from_slice(&group[..n_train]);
        test.extend_from_slice(&group[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Deterministic seeded (stratified) partition of `items`.
pub fn split<T: Clone>(
    items: &[T],
    label_of: impl Fn(&T) -> Label,
    spec: &SplitSpec,
) -> Result<(Vec<T>, Vec<T>)> {
    let labels: Vec<Label> = items.iter().map(&label_of).collect();
    let (train, test) = split_indices(&labels, spec)?;
    Ok((
        train.iter().map(|&i| items[i].clone()).collect(),
        test.iter().map(|&i| items[i].clone()).collect(),
    ))
}
