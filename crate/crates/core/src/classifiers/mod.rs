//! Binary classifiers over ±1 labels: a tanh MLP, an RBF SVM and a Fisher
//! discriminant. Every model reports a real score whose sign is the label.

pub mod lda;
pub mod mlp;
pub mod scaling;
pub mod svm;

use serde::{Deserialize, Serialize};

pub use lda::{lda_train, LdaClassifier};
pub use mlp::{mlp_train, MlpConfig, MlpGradient, MlpModel};
pub use scaling::{Scaling, Standardizer};
pub use svm::{rbf_kernel, svm_train, SvmConfig, SvmDiagnostics, SvmModel};

use crate::error::Result;
use crate::label::Label;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    pub mlp: MlpConfig,
    pub svm: SvmConfig,
    /// `None` picks a ridge proportional to the within-class scatter trace.
    pub lda_ridge: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    Mlp(MlpModel),
    Svm(SvmModel),
    Lda(LdaClassifier),
    /// Always answers the same label with score ±1.
    Constant { label: Label },
}

impl Classifier {
    pub fn kind(&self) -> &'static str {
        match self {
            Classifier::Mlp(_) => "mlp",
            Classifier::Svm(_) => "svm",
            Classifier::Lda(_) => "lda",
            Classifier::Constant { .. } => "constant",
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<(Label, f64)> {
        match self {
            Classifier::Mlp(m) => m.predict(x),
            Classifier::Svm(m) => m.predict(x),
            Classifier::Lda(m) => m.predict(x),
            Classifier::Constant { label } => Ok((*label, label.as_f64())),
        }
    }
}
