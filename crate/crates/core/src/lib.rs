//! Facial binary-attribute classification by weighted fusion of four
//! feature/classifier frameworks: uniform LBP + PCA + MLP, Gabor bank +
//! PCA + RBF SVM, lower-face texture + RBF SVM, and side-outline geometry
//! + Fisher LDA.

pub mod classifiers;
pub mod config;
pub mod dataset;
pub mod error;
pub mod features;
pub mod label;
pub mod linalg;
pub mod pipeline;
pub mod preprocess;
pub mod subspace;
pub mod synthetic;

pub use error::{Error, Result};
pub use label::Label;
