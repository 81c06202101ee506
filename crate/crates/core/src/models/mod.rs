//! Linear base learners and the stacked ensemble.

mod folds;
mod logistic;
mod platt;
mod stack;
mod svm;

pub use folds::stratified_k_folds;
pub use logistic::{logistic_loss_grad, train_logistic};
pub use platt::platt_calibrate;
pub use stack::{predict_stack, train_stack, train_svm_calibrated, StackModel};
pub use svm::{svm_objective, train_svm, train_svm_sgd};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Exponent clamp inside the sigmoid: keeps probabilities strictly inside
/// (0, 1) in finite arithmetic (sigmoid(±30) is about 1e-13 away from the
/// saturation points).
pub const SIGMOID_CLAMP: f64 = 30.0;

pub fn sigmoid(z: f64) -> f64 {
    let z = z.clamp(-SIGMOID_CLAMP, SIGMOID_CLAMP);
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logistic,
    Svm,
}

/// Training hyperparameters shared by both linear learners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub max_iters: usize,
    pub tolerance: f64,
    /// Only consumed by the stochastic SVM variant; recorded everywhere for
    /// provenance.
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            learning_rate: 0.1,
            l2_lambda: 0.01,
            max_iters: 5000,
            tolerance: 1e-7,
            seed: 0,
        }
    }
}

/// Sigmoid parameters mapping SVM margins to probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub a: f64,
    pub b: f64,
}

/// A trained linear classifier: logistic regression or linear SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: ModelKind,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyper: Hyper,
    /// Platt parameters; required before an SVM can emit probabilities.
    pub calibration: Option<Calibration>,
    /// Regularized objective at termination.
    pub final_loss: f64,
    /// Number of parameter updates performed.
    pub iterations: usize,
}

impl LinearModel {
    /// Raw decision value w·x + b.
    pub fn margin(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::config(format!(
                "feature width {} does not match model width {}",
                x.len(),
                self.weights.len()
            )));
        }
        Ok(dot(&self.weights, x) + self.bias)
    }

    /// Probability of the positive class, strictly inside (0, 1).
    ///
    /// Logistic models apply the sigmoid to the margin; SVMs require Platt
    /// calibration and error without it (the raw margin stays available via
    /// [`LinearModel::margin`]).
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        let m = self.margin(x)?;
        match self.kind {
            ModelKind::Logistic => Ok(sigmoid(m)),
            ModelKind::Svm => {
                let cal = self.calibration.ok_or_else(|| {
                    Error::config(
                        "svm model has no calibration; train with calibration or use margin()",
                    )
                })?;
                Ok(sigmoid(cal.a * m + cal.b))
            }
        }
    }
}

/// Anything that can score a feature vector with an enacted-probability.
pub trait Predictor {
    fn predict_proba(&self, x: &[f64]) -> Result<f64>;
    fn width(&self) -> usize;
}

impl Predictor for LinearModel {
    fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        LinearModel::predict_proba(self, x)
    }

    fn width(&self) -> usize {
        self.weights.len()
    }
}

/// Training result: the model plus the objective value recorded before every
/// update and once after the last one.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: LinearModel,
    pub trace: Vec<f64>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn check_training_input(x: &FeatureMatrix, y: &[u8]) -> Result<()> {
    if x.rows() < 2 {
        return Err(Error::config("training needs at least 2 rows"));
    }
    if x.rows() != y.len() {
        return Err(Error::config(format!(
            "labels length {} does not match {} rows",
            y.len(),
            x.rows()
        )));
    }
    let pos = y.iter().filter(|&&v| v == 1).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::config(
            "training data contains a single class; both outcomes are required",
        ));
    }
    Ok(())
}
