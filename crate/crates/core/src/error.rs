use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("no convergence after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("class {0} has no samples")]
    EmptyClass(&'static str),

    #[error("within-class scatter is singular even with ridge {0:e}")]
    SingularScatter(f64),

    #[error("between-class scatter vanishes; class means coincide")]
    DegenerateDirection,

    #[error("training loss became non-finite at epoch {0}")]
    NonFiniteLoss(usize),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("weight subset too small: {0}")]
    WeightSubsetTooSmall(String),

    #[error("test set is empty")]
    EmptyTestSet,

    #[error("model version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u64 },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfig(String),

    #[error("data has zero variance")]
    ZeroVariance,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
