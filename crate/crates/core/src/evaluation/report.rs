//! Evaluation reports: per-model metric bundles, the six-column table, the
//! per-class breakdown, and the oversampling ablation pairing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::models::Predictor;

use super::{brier, classification_metrics, roc_auc, MetricsSummary};

/// Everything reported for one model on one test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// Display name, e.g. "Stacked Ensemble".
    pub model: String,
    pub n_test: usize,
    pub threshold: f64,
    pub metrics: MetricsSummary,
    pub auc: f64,
    pub brier: f64,
    pub model_id: String,
    pub config_digest: String,
}

/// Score the test matrix and assemble the report. Predictions use the rule
/// p ≥ threshold → enacted.
pub fn evaluate(
    model: &dyn Predictor,
    name: &str,
    test: &FeatureMatrix,
    threshold: f64,
    model_id: &str,
    config_digest: &str,
) -> Result<EvaluationReport> {
    let labels = test.labels_or_err()?;
    if test.rows() == 0 {
        return Err(Error::config("evaluate: empty test set"));
    }
    if test.width() != model.width() {
        return Err(Error::config(format!(
            "evaluate: test width {} does not match model width {}",
            test.width(),
            model.width()
        )));
    }

    let mut probabilities = Vec::with_capacity(test.rows());
    for row in test.iter_rows() {
        probabilities.push(model.predict_proba(row)?);
    }
    let predictions: Vec<u8> = probabilities
        .iter()
        .map(|&p| u8::from(p >= threshold))
        .collect();

    let metrics = classification_metrics(labels, &predictions)?;
    let auc = roc_auc(labels, &probabilities)?;
    let brier_score = brier(labels, &probabilities)?;

    Ok(EvaluationReport {
        model: name.to_string(),
        n_test: test.rows(),
        threshold,
        metrics,
        auc,
        brier: brier_score,
        model_id: model_id.to_string(),
        config_digest: config_digest.to_string(),
    })
}

/// Aligned plain-text table with exactly the six metric columns, macro
/// averages per row.
pub fn render_table(reports: &[EvaluationReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<24} {:>8} {:>10} {:>8} {:>8} {:>11} {:>9}\n",
        "Model", "F1", "Precision", "Recall", "AUC", "Brier Loss", "Accuracy"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<24} {:>8.4} {:>10.4} {:>8.4} {:>8.4} {:>11.4} {:>9.4}\n",
            r.model,
            r.metrics.macro_f1,
            r.metrics.macro_precision,
            r.metrics.macro_recall,
            r.auc,
            r.brier,
            r.metrics.accuracy,
        ));
    }
    out
}

/// Per-class breakdown lines (not-enacted first, mirroring the headline
/// per-class F1 presentation).
pub fn render_per_class(reports: &[EvaluationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("{}:\n", r.model));
        for (label, m) in [
            ("not_enacted", &r.metrics.not_enacted),
            ("enacted", &r.metrics.enacted),
        ] {
            out.push_str(&format!(
                "  {label:<12} f1 {:>7.4}  precision {:>7.4}  recall {:>7.4}  support {:>4}\n",
                m.f1, m.precision, m.recall, m.support
            ));
        }
        if r.metrics.zero_division {
            out.push_str("  note: a zero-division case was reported as 0\n");
        }
    }
    out
}

/// Per-metric differences, (with SMOTE) − (without SMOTE).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDeltas {
    pub model: String,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub auc: f64,
    pub brier: f64,
    pub accuracy: f64,
}

/// Paired reports from two pipelines that differ only in the SMOTE step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub with_smote: Vec<EvaluationReport>,
    pub without_smote: Vec<EvaluationReport>,
    pub deltas: Vec<MetricDeltas>,
}

impl AblationReport {
    /// Pair up reports by position and compute the per-metric deltas.
    pub fn from_pair(
        with_smote: Vec<EvaluationReport>,
        without_smote: Vec<EvaluationReport>,
    ) -> Result<AblationReport> {
        if with_smote.len() != without_smote.len() {
            return Err(Error::config(
                "ablation produced unequal report counts for the two branches",
            ));
        }
        let deltas = with_smote
            .iter()
            .zip(&without_smote)
            .map(|(a, b)| MetricDeltas {
                model: a.model.clone(),
                f1: a.metrics.macro_f1 - b.metrics.macro_f1,
                precision: a.metrics.macro_precision - b.metrics.macro_precision,
                recall: a.metrics.macro_recall - b.metrics.macro_recall,
                auc: a.auc - b.auc,
                brier: a.brier - b.brier,
                accuracy: a.metrics.accuracy - b.metrics.accuracy,
            })
            .collect();
        Ok(AblationReport {
            with_smote,
            without_smote,
            deltas,
        })
    }

    /// Side-by-side text rendering: both tables plus the delta rows.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("=== with SMOTE ===\n");
        out.push_str(&render_table(&self.with_smote));
        out.push_str("\n=== without SMOTE ===\n");
        out.push_str(&render_table(&self.without_smote));
        out.push_str("\n=== deltas (with − without) ===\n");
        out.push_str(&format!(
            "{:<24} {:>8} {:>10} {:>8} {:>8} {:>11} {:>9}\n",
            "Model", "F1", "Precision", "Recall", "AUC", "Brier Loss", "Accuracy"
        ));
        for d in &self.deltas {
            out.push_str(&format!(
                "{:<24} {:>+8.4} {:>+10.4} {:>+8.4} {:>+8.4} {:>+11.4} {:>+9.4}\n",
                d.model, d.f1, d.precision, d.recall, d.auc, d.brier, d.accuracy
            ));
        }
        out
    }
}
