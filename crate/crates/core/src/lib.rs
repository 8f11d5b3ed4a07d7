//! Chest X-ray feature pipeline: feature-matrix storage, filter feature
//! selection (ReliefF, chi-square, elbow cutoff), RBF-kernel SVM trained by
//! SMO, Gaussian-process Bayesian tuning of `(C, gamma)`, binary metrics and
//! an experiment runner that ties them together.
//!
//! The crate works on pre-extracted CNN activations stored as FMX files;
//! image handling lives elsewhere.

pub mod bayesopt;
pub mod error;
pub mod featurestore;
pub mod metrics;
pub mod rng;
pub mod runner;
pub mod selection;
pub mod svm;
pub mod synthetic;

pub use error::{Error, FormatError, Result};
pub use featurestore::{FeatureMatrix, FeatureOrigin, LabelVector, SplitPlan, StandardizationParams};
