//! The four feature/classifier frameworks and their accuracy-weighted vote.

pub mod eval;
pub mod extract;
pub mod model_file;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use eval::{evaluate, ColumnStats, EvalReport};
pub use extract::{
    extract_f1, extract_f2, extract_f3, extract_f4, prepare, ExtractConfig, Extractor, FeatureSet, Prepared,
};
pub use model_file::{load_model, save_model, MODEL_VERSION};

use crate::classifiers::{lda_train, mlp_train, svm_train, Classifier, Scaling, Standardizer, TrainConfig};
use crate::dataset::{split_indices, Sample, SplitSpec};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::subspace::{pca_fit, PcaModel, PcaOptions};

pub const FRAMEWORK_COUNT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameworkId {
    /// LBP → PCA → MLP
    F1,
    /// Gabor → PCA → SVM
    F2,
    /// lower-face intensities → SVM
    F3,
    /// side outline → LDA
    F4,
}

impl FrameworkId {
    pub const ALL: [FrameworkId; FRAMEWORK_COUNT] = [FrameworkId::F1, FrameworkId::F2, FrameworkId::F3, FrameworkId::F4];

    pub fn index(self) -> usize {
        self as usize
    }

    fn uses_pca(self) -> bool {
        matches!(self, FrameworkId::F1 | FrameworkId::F2)
    }

    fn scaling(self) -> Scaling {
        match self {
            FrameworkId::F1 => Scaling::ZScore,
            FrameworkId::F2 | FrameworkId::F3 => Scaling::ZScoreUnitDistance,
            FrameworkId::F4 => Scaling::None,
        }
    }
}

impl fmt::Display for FrameworkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.index() + 1)
    }
}

/// Where the fusion weights are measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Stratified holdout of the training split, excluded from fitting.
    #[default]
    Holdout,
    /// Accuracy on the full training split, which is also used for fitting.
    Training,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Train/test partition of the dataset; recorded so evaluation can
    /// reproduce it.
    pub split: SplitSpec,
    pub extract: ExtractConfig,
    pub pca: PcaOptions,
    pub train: TrainConfig,
    pub weight_mode: WeightMode,
    /// Fraction of the training split held out in [`WeightMode::Holdout`].
    pub weight_fraction: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            split: SplitSpec::default(),
            extract: ExtractConfig::default(),
            pca: PcaOptions::default(),
            train: TrainConfig::default(),
            weight_mode: WeightMode::Holdout,
            weight_fraction: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameworkModel {
    pub id: FrameworkId,
    pub pca: Option<PcaModel>,
    pub scaler: Option<Standardizer>,
    pub classifier: Classifier,
    /// Recognition rate on the weight subset, in [0, 1].
    pub accuracy: f64,
}

impl FrameworkModel {
    /// Framework that always votes `label`; used for stubbed fusion runs.
    pub fn constant(id: FrameworkId, label: Label, accuracy: f64) -> FrameworkModel {
        FrameworkModel {
            id,
            pca: None,
            scaler: None,
            classifier: Classifier::Constant { label },
            accuracy,
        }
    }

    pub fn predict(&self, features: &[f64]) -> Result<(Label, f64)> {
        let projected;
        let mut x = features;
        if let Some(pca) = &self.pca {
            projected = pca.project(x)?;
            x = &projected;
        }
        match &self.scaler {
            Some(s) => self.classifier.predict(&s.transform(x)?),
            None => self.classifier.predict(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionModel {
    pub config: PipelineConfig,
    pub frameworks: Vec<FrameworkModel>,
    pub weights: Vec<f64>,
}

impl FusionModel {
    /// Weights are taken from the frameworks' measured accuracies.
    pub fn from_frameworks(config: PipelineConfig, frameworks: Vec<FrameworkModel>) -> Result<FusionModel> {
        if frameworks.len() != FRAMEWORK_COUNT {
            return Err(Error::LengthMismatch(format!(
                "expected {FRAMEWORK_COUNT} frameworks, got {}",
                frameworks.len()
            )));
        }
        for (fw, id) in frameworks.iter().zip(FrameworkId::ALL) {
            if fw.id != id {
                return Err(Error::CorruptModel(format!("framework {} found in slot {id}", fw.id)));
            }
            if !(0.0..=1.0).contains(&fw.accuracy) {
                return Err(Error::CorruptModel(format!("{id} accuracy {} outside [0, 1]", fw.accuracy)));
            }
        }
        let weights = frameworks.iter().map(|f| f.accuracy).collect();
        Ok(FusionModel {
            config,
            frameworks,
            weights,
        })
    }

    pub fn extractor(&self) -> Result<Extractor> {
        Extractor::new(self.config.extract)
    }
}

/// `Σ wᵢvᵢ`
pub fn weighted_sum(votes: &[Label], weights: &[f64]) -> Result<f64> {
    if votes.len() != FRAMEWORK_COUNT || weights.len() != FRAMEWORK_COUNT {
        return Err(Error::LengthMismatch(format!(
            "fusion needs {FRAMEWORK_COUNT} votes and weights, got {} and {}",
            votes.len(),
            weights.len()
        )));
    }
    Ok(votes.iter().zip(weights).map(|(v, w)| w * v.as_f64()).sum())
}

/// `Female` when `Σ wᵢvᵢ ≥ 0`, `Male` otherwise.
pub fn fuse(votes: &[Label], weights: &[f64]) -> Result<Label> {
    Ok(Label::from_score(weighted_sum(votes, weights)?))
}

/// Full decision trace of one fused prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub fused: Label,
    pub votes: [Label; FRAMEWORK_COUNT],
    pub scores: [f64; FRAMEWORK_COUNT],
    pub weighted_sum: f64,
}

pub fn predict_features(model: &FusionModel, features: &FeatureSet) -> Result<Prediction> {
    let mut votes = [Label::Female; FRAMEWORK_COUNT];
    let mut scores = [0.0; FRAMEWORK_COUNT];
    for (i, fw) in model.frameworks.iter().enumerate() {
        (votes[i], scores[i]) = fw.predict(&features[i])?;
    }
    let weighted_sum = weighted_sum(&votes, &model.weights)?;
    Ok(Prediction {
        fused: Label::from_score(weighted_sum),
        votes,
        scores,
        weighted_sum,
    })
}

pub fn predict(model: &FusionModel, sample: &Sample) -> Result<Prediction> {
    predict_features(model, &model.extractor()?.extract(sample)?)
}

/// Extracts every sample's features in parallel, preserving input order.
pub fn extract_all(extractor: &Extractor, samples: &[Sample]) -> Result<Vec<FeatureSet>> {
    samples
        .par_iter()
        .map(|s| extractor.extract(s).map_err(|e| tag_sample(&s.id, e)))
        .collect()
}

fn tag_sample(id: &str, e: Error) -> Error {
    match e {
        Error::DegenerateRegion(m) => Error::DegenerateRegion(format!("{id}: {m}")),
        other => other,
    }
}

fn fit_framework(
    id: FrameworkId,
    xs: &[Vec<f64>],
    labels: &[Label],
    cfg: &PipelineConfig,
) -> Result<(Option<PcaModel>, Option<Standardizer>, Classifier)> {
    let (pca, reduced) = if id.uses_pca() {
        let pca = pca_fit(xs, &cfg.pca)?;
        let reduced = xs.iter().map(|x| pca.project(x)).collect::<Result<Vec<_>>>()?;
        log::debug!("{id}: PCA keeps {} of {} dimensions", pca.output_dim(), pca.input_dim());
        (Some(pca), reduced)
    } else {
        (None, xs.to_vec())
    };
    let scaling = id.scaling();
    let (scaler, inputs) = if scaling == Scaling::None {
        (None, reduced)
    } else {
        let s = Standardizer::fit(&reduced, scaling)?;
        let inputs = s.transform_all(&reduced)?;
        (Some(s), inputs)
    };
    let t = &cfg.train;
    let classifier = match id {
        FrameworkId::F1 => Classifier::Mlp(mlp_train(&inputs, labels, &t.mlp, t.seed)?),
        FrameworkId::F2 | FrameworkId::F3 => {
            let m = svm_train(&inputs, labels, &t.svm)?;
            if !m.diagnostics.converged {
                log::warn!(
                    "{id}: SVM stopped before convergence (violation {:.3e})",
                    m.diagnostics.max_violation
                );
            }
            Classifier::Svm(m)
        }
        FrameworkId::F4 => Classifier::Lda(lda_train(&inputs, labels, t.lda_ridge)?),
    };
    Ok((pca, scaler, classifier))
}

/// Positions of the fitting subset and of the weight subset within `labels`.
pub fn weight_partition(labels: &[Label], cfg: &PipelineConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    match cfg.weight_mode {
        WeightMode::Training => {
            let all: Vec<usize> = (0..labels.len()).collect();
            Ok((all.clone(), all))
        }
        WeightMode::Holdout => {
            let spec = SplitSpec {
                train_fraction: 1.0 - cfg.weight_fraction,
                seed: cfg.train.seed,
                stratified: true,
            };
            let (fit, held) = split_indices(labels, &spec)
                .map_err(|e| Error::WeightSubsetTooSmall(e.to_string()))?;
            for class in Label::BOTH {
                let n = held.iter().filter(|&&i| labels[i] == class).count();
                if n < 2 {
                    return Err(Error::WeightSubsetTooSmall(format!(
                        "{n} {} sample(s) in the weight subset, need at least 2",
                        class.name()
                    )));
                }
            }
            Ok((fit, held))
        }
    }
}

pub fn train_all(train: &[Sample], cfg: &PipelineConfig) -> Result<FusionModel> {
    for class in Label::BOTH {
        if !train.iter().any(|s| s.label == class) {
            return Err(Error::EmptyClass(class.name()));
        }
    }
    let extractor = Extractor::new(cfg.extract)?;
    let features = extract_all(&extractor, train)?;
    let labels: Vec<Label> = train.iter().map(|s| s.label).collect();
    let (fit_idx, weight_idx) = weight_partition(&labels, cfg)?;
    let fit_labels: Vec<Label> = fit_idx.iter().map(|&i| labels[i]).collect();

    let frameworks = FrameworkId::ALL
        .par_iter()
        .map(|&id| {
            let xs: Vec<Vec<f64>> = fit_idx.iter().map(|&i| features[i][id.index()].clone()).collect();
            let (pca, scaler, classifier) = fit_framework(id, &xs, &fit_labels, cfg)?;
            let mut model = FrameworkModel {
                id,
                pca,
                scaler,
                classifier,
                accuracy: 0.0,
            };
            let mut correct = 0usize;
            for &i in &weight_idx {
                if model.predict(&features[i][id.index()])?.0 == labels[i] {
                    correct += 1;
                }
            }
            model.accuracy = correct as f64 / weight_idx.len() as f64;
            log::info!("{id}: weight {:.4} on {} samples", model.accuracy, weight_idx.len());
            Ok(model)
        })
        .collect::<Result<Vec<_>>>()?;
    FusionModel::from_frameworks(*cfg, frameworks)
}
