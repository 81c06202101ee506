//! Splitting, the five Table-style metrics, per-class and macro reporting,
//! and grouped permutation feature importance.

mod importance;
mod report;
mod split;

pub use importance::{
    permutation_importance, weight_mass_by_group, GroupImportance, ImportanceMetric,
};
pub use report::{
    evaluate, render_per_class, render_table, AblationReport, EvaluationReport, MetricDeltas,
};
pub use split::{split_records, train_test_split};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Per-class, macro, and weighted classification metrics plus the confusion
/// counts (positive class = enacted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub enacted: ClassMetrics,
    pub not_enacted: ClassMetrics,
    pub macro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub weighted_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub accuracy: f64,
    pub confusion: Confusion,
    pub n: usize,
    /// True when any precision/recall/F1 hit a 0/0 case (reported as 0).
    pub zero_division: bool,
}

fn safe_ratio(num: usize, den: usize, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1_of(precision: f64, recall: f64, flag: &mut bool) -> f64 {
    if precision + recall == 0.0 {
        *flag = true;
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Confusion-matrix metrics for binary predictions. 0/0 cases yield 0 and
/// set the `zero_division` flag instead of producing NaN.
pub fn classification_metrics(y_true: &[u8], y_pred: &[u8]) -> Result<MetricsSummary> {
    if y_true.is_empty() {
        return Err(Error::config("classification_metrics: empty input"));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::config(format!(
            "classification_metrics: {} labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }

    let mut c = Confusion {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => c.tp += 1,
            (0, 1) => c.fp += 1,
            (0, 0) => c.tn += 1,
            (1, 0) => c.fn_ += 1,
            _ => return Err(Error::config("labels and predictions must be 0 or 1")),
        }
    }

    let mut flag = false;
    let pos_precision = safe_ratio(c.tp, c.tp + c.fp, &mut flag);
    let pos_recall = safe_ratio(c.tp, c.tp + c.fn_, &mut flag);
    let pos_f1 = f1_of(pos_precision, pos_recall, &mut flag);
    let neg_precision = safe_ratio(c.tn, c.tn + c.fn_, &mut flag);
    let neg_recall = safe_ratio(c.tn, c.tn + c.fp, &mut flag);
    let neg_f1 = f1_of(neg_precision, neg_recall, &mut flag);

    let n = y_true.len();
    let pos_support = c.tp + c.fn_;
    let neg_support = c.tn + c.fp;
    let weighted = |pos: f64, neg: f64| {
        (pos * pos_support as f64 + neg * neg_support as f64) / n as f64
    };

    Ok(MetricsSummary {
        enacted: ClassMetrics {
            precision: pos_precision,
            recall: pos_recall,
            f1: pos_f1,
            support: pos_support,
        },
        not_enacted: ClassMetrics {
            precision: neg_precision,
            recall: neg_recall,
            f1: neg_f1,
            support: neg_support,
        },
        macro_f1: (pos_f1 + neg_f1) / 2.0,
        macro_precision: (pos_precision + neg_precision) / 2.0,
        macro_recall: (pos_recall + neg_recall) / 2.0,
        weighted_f1: weighted(pos_f1, neg_f1),
        weighted_precision: weighted(pos_precision, neg_precision),
        weighted_recall: weighted(pos_recall, neg_recall),
        accuracy: (c.tp + c.tn) as f64 / n as f64,
        confusion: c,
        n,
        zero_division: flag,
    })
}

/// Mann-Whitney ROC AUC: the probability that a random positive outranks a
/// random negative, ties counted half. Computed by average-rank sums.
pub fn roc_auc(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    if y_true.len() != scores.len() || y_true.is_empty() {
        return Err(Error::config(
            "roc_auc needs matching, non-empty labels and scores",
        ));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::numeric("roc_auc got a non-finite score"));
    }
    let n_pos = y_true.iter().filter(|&&v| v == 1).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::config("roc_auc needs both classes present"));
    }

    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Average ranks within tie groups, 1-based.
    let mut ranks = vec![0.0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }

    let rank_sum_pos: f64 = (0..n).filter(|&i| y_true[i] == 1).map(|i| ranks[i]).sum();
    let auc = (rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0) / (n_pos as f64 * n_neg as f64);
    Ok(auc)
}

/// Mean squared difference between probabilities and outcomes. Errors on any
/// probability outside [0, 1].
pub fn brier(y_true: &[u8], probabilities: &[f64]) -> Result<f64> {
    if y_true.len() != probabilities.len() || y_true.is_empty() {
        return Err(Error::config(
            "brier needs matching, non-empty labels and probabilities",
        ));
    }
    let mut sum = 0.0;
    for (&y, &p) in y_true.iter().zip(probabilities) {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::config(format!("probability {p} outside [0, 1]")));
        }
        let d = p - y as f64;
        sum += d * d;
    }
    Ok(sum / y_true.len() as f64)
}
