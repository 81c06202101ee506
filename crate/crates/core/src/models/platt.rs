//! Platt scaling: fit sigmoid(A·margin + B) to out-of-fold margins by
//! Newton's method with backtracking, using the standard smoothed targets
//! t⁺ = (N⁺+1)/(N⁺+2) and t⁻ = 1/(N⁻+2).

use crate::error::{Error, Result};

use super::sigmoid;

const MAX_ITERS: usize = 100;
const MIN_STEP: f64 = 1e-10;
const RIDGE: f64 = 1e-12;
const GRAD_TOL: f64 = 1e-5;

fn negative_log_likelihood(margins: &[f64], targets: &[f64], a: f64, b: f64) -> f64 {
    let mut value = 0.0;
    for (&m, &t) in margins.iter().zip(targets) {
        let f = a * m + b;
        // -[t ln p + (1-t) ln(1-p)] for p = sigmoid(f), written overflow-free.
        if f >= 0.0 {
            value += (1.0 - t) * f + (1.0 + (-f).exp()).ln();
        } else {
            value += -t * f + (1.0 + f.exp()).ln();
        }
    }
    value
}

/// Fit (A, B). A may come out non-positive when margins anti-correlate with
/// the labels. Errors if Newton fails to converge within 100 iterations.
pub fn platt_calibrate(margins: &[f64], y: &[u8]) -> Result<(f64, f64)> {
    if margins.len() != y.len() || margins.is_empty() {
        return Err(Error::config(
            "platt calibration needs matching, non-empty margins and labels",
        ));
    }
    if margins.iter().any(|m| !m.is_finite()) {
        return Err(Error::numeric("platt calibration got a non-finite margin"));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    let n_neg = y.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::config(
            "platt calibration needs both classes present",
        ));
    }

    let hi = (n_pos as f64 + 1.0) / (n_pos as f64 + 2.0);
    let lo = 1.0 / (n_neg as f64 + 2.0);
    let targets: Vec<f64> = y.iter().map(|&v| if v == 1 { hi } else { lo }).collect();

    let mut a = 0.0;
    let mut b = ((n_pos as f64 + 1.0) / (n_neg as f64 + 1.0)).ln();
    let mut value = negative_log_likelihood(margins, &targets, a, b);

    for _ in 0..MAX_ITERS {
        // Gradient and Hessian of the NLL in (A, B).
        let mut g_a = 0.0;
        let mut g_b = 0.0;
        let mut h11 = RIDGE;
        let mut h12 = 0.0;
        let mut h22 = RIDGE;
        for (&m, &t) in margins.iter().zip(&targets) {
            let p = sigmoid(a * m + b);
            let d1 = p - t;
            let d2 = p * (1.0 - p);
            g_a += d1 * m;
            g_b += d1;
            h11 += d2 * m * m;
            h12 += d2 * m;
            h22 += d2;
        }

        if g_a.abs() < GRAD_TOL && g_b.abs() < GRAD_TOL {
            return Ok((a, b));
        }

        let det = h11 * h22 - h12 * h12;
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::numeric(format!(
                "platt calibration: singular Hessian (det = {det})"
            )));
        }
        let da = -(h22 * g_a - h12 * g_b) / det;
        let db = -(h11 * g_b - h12 * g_a) / det;
        let descent = g_a * da + g_b * db;

        let mut step = 1.0;
        let mut accepted = false;
        while step >= MIN_STEP {
            let na = a + step * da;
            let nb = b + step * db;
            let nv = negative_log_likelihood(margins, &targets, na, nb);
            if nv < value + 1e-4 * step * descent {
                a = na;
                b = nb;
                value = nv;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            return Err(Error::numeric(format!(
                "platt calibration: line search failed (value = {value}, grad = [{g_a}, {g_b}])"
            )));
        }
    }

    Err(Error::numeric(format!(
        "platt calibration did not converge in {MAX_ITERS} iterations (value = {value})"
    )))
}
