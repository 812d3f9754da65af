//! Turn-level task segmentation for spoken dialogs.
//!
//! Each user turn folds its understanding results into a confidence-coded
//! user register. The register, together with the last few task labels,
//! is encoded as a feature vector and scored by one of three classifiers:
//! an information-gain decision tree, an evolving fuzzy rule-based
//! classifier and a multilayer perceptron.

pub mod classifiers;
pub mod cli;
pub mod corpus;
pub mod encoder;
pub mod error;
pub mod evaluator;
pub mod parallel;
pub mod register;
pub mod rng;
pub mod segmenter;
pub mod synthgen;

pub use error::{Error, Result};
