//! Predicting whether a parliamentary bill will be enacted.
//!
//! The pipeline: parse bill records, engineer features (including pooled
//! word vectors or a bag of words), standardize, oversample the minority
//! class with SMOTE, train logistic-regression and linear-SVM base learners,
//! stack them under a logistic meta-learner, and evaluate with per-class and
//! macro F1/precision/recall, ROC AUC, Brier score, and accuracy, plus
//! grouped permutation feature importance.
//!
//! Everything is seeded and deterministic: identical inputs and
//! configuration reproduce outputs byte for byte.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod models;
pub mod persist;
pub mod pipeline;
pub mod resampling;
pub mod rng;

pub use error::{Error, Result};
