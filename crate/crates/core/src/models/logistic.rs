//! Logistic regression by full-batch gradient descent.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

use super::{check_training_input, dot, sigmoid, Hyper, LinearModel, ModelKind, TrainOutcome};

/// Regularized objective and its gradient at (weights, bias):
/// mean binary cross-entropy plus (λ/2)‖w‖², bias unregularized.
pub fn logistic_loss_grad(
    x: &FeatureMatrix,
    y: &[u8],
    weights: &[f64],
    bias: f64,
    l2_lambda: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.rows() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;

    for (row, &label) in x.iter_rows().zip(y) {
        let target = label as f64;
        let p = sigmoid(dot(weights, row) + bias);
        loss -= target * p.ln() + (1.0 - target) * (1.0 - p).ln();
        let residual = p - target;
        for (g, v) in grad_w.iter_mut().zip(row) {
            *g += residual * v;
        }
        grad_b += residual;
    }

    loss /= n;
    grad_b /= n;
    let mut reg = 0.0;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2_lambda * w;
        reg += w * w;
    }
    loss += 0.5 * l2_lambda * reg;
    (loss, grad_w, grad_b)
}

/// Train from zero initialization; stops when the objective change drops
/// below `tolerance` or after `max_iters` updates. The returned trace holds
/// the objective before every update plus the final value.
pub fn train_logistic(x: &FeatureMatrix, y: &[u8], hyper: &Hyper) -> Result<TrainOutcome> {
    check_training_input(x, y)?;

    let mut weights = vec![0.0; x.width()];
    let mut bias = 0.0;
    let mut trace = Vec::new();
    let mut iterations = 0usize;
    let mut prev_loss = f64::INFINITY;

    for iter in 0..hyper.max_iters {
        let (loss, grad_w, grad_b) = logistic_loss_grad(x, y, &weights, bias, hyper.l2_lambda);
        if !loss.is_finite() {
            return Err(Error::numeric(format!(
                "logistic training diverged at iteration {iter}; lower the learning rate"
            )));
        }
        trace.push(loss);
        if (prev_loss - loss).abs() < hyper.tolerance {
            break;
        }
        prev_loss = loss;
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= hyper.learning_rate * g;
        }
        bias -= hyper.learning_rate * grad_b;
        iterations = iter + 1;
    }

    let (final_loss, _, _) = logistic_loss_grad(x, y, &weights, bias, hyper.l2_lambda);
    if !final_loss.is_finite() {
        return Err(Error::numeric(
            "logistic training ended on a non-finite loss; lower the learning rate",
        ));
    }
    trace.push(final_loss);

    Ok(TrainOutcome {
        model: LinearModel {
            kind: ModelKind::Logistic,
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
