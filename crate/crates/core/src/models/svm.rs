//! Linear SVM trained by subgradient descent on the hinge loss.
//!
//! Labels are mapped to ±1 internally. The default trainer is full-batch and
//! fully deterministic; a stochastic variant with a seeded per-epoch shuffle
//! is available as [`train_svm_sgd`].

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::rng::{streams, DetRng};

use super::{check_training_input, dot, Hyper, LinearModel, ModelKind, TrainOutcome};

/// Mean hinge loss max(0, 1 − y(w·x + b)) plus (λ/2)‖w‖².
pub fn svm_objective(
    x: &FeatureMatrix,
    y: &[u8],
    weights: &[f64],
    bias: f64,
    l2_lambda: f64,
) -> f64 {
    let n = x.rows() as f64;
    let mut hinge = 0.0;
    for (row, &label) in x.iter_rows().zip(y) {
        let sign = if label == 1 { 1.0 } else { -1.0 };
        hinge += (1.0 - sign * (dot(weights, row) + bias)).max(0.0);
    }
    hinge / n + 0.5 * l2_lambda * dot(weights, weights)
}

fn svm_subgradient(
    x: &FeatureMatrix,
    y: &[u8],
    weights: &[f64],
    bias: f64,
    l2_lambda: f64,
) -> (Vec<f64>, f64) {
    let n = x.rows() as f64;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (row, &label) in x.iter_rows().zip(y) {
        let sign = if label == 1 { 1.0 } else { -1.0 };
        // Strict violation: the subgradient at the kink uses the zero branch.
        if 1.0 - sign * (dot(weights, row) + bias) > 0.0 {
            for (g, v) in grad_w.iter_mut().zip(row) {
                *g -= sign * v;
            }
            grad_b -= sign;
        }
    }
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2_lambda * w;
    }
    (grad_w, grad_b / n)
}

/// Full-batch deterministic subgradient descent from zero initialization.
pub fn train_svm(x: &FeatureMatrix, y: &[u8], hyper: &Hyper) -> Result<TrainOutcome> {
    check_training_input(x, y)?;

    let mut weights = vec![0.0; x.width()];
    let mut bias = 0.0;
    let mut trace = Vec::new();
    let mut iterations = 0usize;
    let mut prev = f64::INFINITY;

    for iter in 0..hyper.max_iters {
        let objective = svm_objective(x, y, &weights, bias, hyper.l2_lambda);
        if !objective.is_finite() {
            return Err(Error::numeric(format!(
                "svm training diverged at iteration {iter}; lower the learning rate"
            )));
        }
        trace.push(objective);
        if (prev - objective).abs() < hyper.tolerance {
            break;
        }
        prev = objective;
        let (grad_w, grad_b) = svm_subgradient(x, y, &weights, bias, hyper.l2_lambda);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= hyper.learning_rate * g;
        }
        bias -= hyper.learning_rate * grad_b;
        iterations = iter + 1;
    }

    let final_loss = svm_objective(x, y, &weights, bias, hyper.l2_lambda);
    if !final_loss.is_finite() {
        return Err(Error::numeric(
            "svm training ended on a non-finite objective; lower the learning rate",
        ));
    }
    trace.push(final_loss);

    Ok(TrainOutcome {
        model: LinearModel {
            kind: ModelKind::Svm,
            weights,
            bias,
            hyper: *hyper,
            calibration: None,
            final_loss,
            iterations,
        },
        trace,
    })
}

/// Stochastic variant: one subgradient step per sample, samples visited in a
/// seeded shuffle per epoch, step size decayed as lr/(1 + λ·t). The trace
/// records the full objective once per epoch.
pub fn train_svm_sgd(x: &FeatureMatrix, y: &[u8], hyper: &Hyper) -> Result<TrainOutcome> {
    check_training_input(x, y)?;

    let n = x.rows();
    let mut weights = vec![0.0; x.width()];
    let mut bias = 0.0;
    let mut trace = Vec::new();
    let mut iterations = 0usize;
    let mut prev = f64::INFINITY;
    let mut rng = DetRng::new(hyper.seed, streams::SGD_EPOCH);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0usize;

    for epoch in 0..hyper.max_iters {
        let objective = svm_objective(x, y, &weights, bias, hyper.l2_lambda);
        if !objective.is_finite() {
            return Err(Error::numeric(format!(
                "svm sgd diverged at epoch {epoch}; lower the learning rate"
            )));
        }
        trace.push(objective);
        if (prev - objective).abs() < hyper.tolerance {
            break;
        }
        prev = objective;

        rng.shuffle(&mut order);
        for &i in &order {
            let step = hyper.learning_rate / (1.0 + hyper.l2_lambda * t as f64);
            let row = x.row(i);
            let sign = if y[i] == 1 { 1.0 } else { -1.0 };
            let violated = 1.0 - sign * (dot(&weights, row) + bias) > 0.0;
            for (w, v) in weights.iter_mut().zip(row) {
                let g = hyper.l2_lambda * *w - if violated { sign * v } else { 0.0 };
                *w -= step * g;
            }
            if violated {
                bias += step * sign;
            }
            t += 1;
        }
        iterations = epoch + 1;
    }

    let final_loss = svm_objective(x, y, &weights, bias, hyper.l2_lambda);
    trace.push(final_loss);

    Ok(TrainOutcome {
        model: LinearModel {
            kind: ModelKind::Svm,
            weights,
            bias,
            hyper: *hyper,
            calibration: None,
            final_loss,
            iterations,
        },
        trace,
    })
}
