//! Symmetric eigendecomposition, PCA and two-class Fisher scatter analysis.

mod eigen;
mod lda;
mod pca;

pub use eigen::{eig_symmetric, SymmetricEigen};
pub use lda::{default_ridge, lda_direction, scatters, LdaProjection, ScatterPair};
pub use pca::{
    pca_fit, pca_project, retained_count, scatter_spectrum, PcaModel, PcaOptions, PcaSolver,
    RetentionRule, ScatterSpectrum,
};
