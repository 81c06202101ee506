//! Grouped permutation feature importance plus the weight-mass diagnostic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureSchema};
use crate::models::Predictor;
use crate::rng::{streams, DetRng};

use super::{classification_metrics, roc_auc};

/// Metric whose degradation defines importance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMetric {
    #[default]
    MacroF1,
    Accuracy,
    Auc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupImportance {
    /// Group code (F1..F11 or BOW).
    pub group: String,
    /// Human-readable label (Month, Label, ...).
    pub label: String,
    /// Baseline metric minus the mean metric over permuted repeats.
    pub mean: f64,
    /// Population standard deviation over repeats.
    pub std: f64,
}

fn score(
    model: &dyn Predictor,
    test: &FeatureMatrix,
    threshold: f64,
    metric: ImportanceMetric,
) -> Result<f64> {
    let labels = test.labels_or_err()?;
    let mut probabilities = Vec::with_capacity(test.rows());
    for row in test.iter_rows() {
        probabilities.push(model.predict_proba(row)?);
    }
    match metric {
        ImportanceMetric::Auc => roc_auc(labels, &probabilities),
        _ => {
            let predictions: Vec<u8> = probabilities
                .iter()
                .map(|&p| u8::from(p >= threshold))
                .collect();
            let m = classification_metrics(labels, &predictions)?;
            Ok(match metric {
                ImportanceMetric::MacroF1 => m.macro_f1,
                ImportanceMetric::Accuracy => m.accuracy,
                ImportanceMetric::Auc => unreachable!(),
            })
        }
    }
}

/// Shuffle the rows of one group's columns jointly by `perm`.
fn permute_group(test: &FeatureMatrix, group_start: usize, group_len: usize, perm: &[usize]) -> FeatureMatrix {
    let mut out = test.clone();
    let width = test.width();
    let mut scratch = vec![0.0; group_len];
    // Permute via a copy of the source rows so the shuffle is by-value.
    let mut source = Vec::with_capacity(test.rows());
    for i in 0..test.rows() {
        source.push(test.row(i)[group_start..group_start + group_len].to_vec());
    }
    for (i, &from) in perm.iter().enumerate() {
        scratch.copy_from_slice(&source[from]);
        out.values_mut()[i * width + group_start..i * width + group_start + group_len]
            .copy_from_slice(&scratch);
    }
    out
}

/// Importance of each schema group: baseline metric minus the mean metric
/// when the group's columns are jointly row-shuffled, over `n_repeats`
/// repeats (one permutation per repeat, shared across groups). Groups come
/// back ranked descending by mean importance, ties keeping schema order.
pub fn permutation_importance(
    model: &dyn Predictor,
    test: &FeatureMatrix,
    schema: &FeatureSchema,
    metric: ImportanceMetric,
    n_repeats: usize,
    seed: u64,
    threshold: f64,
) -> Result<Vec<GroupImportance>> {
    if n_repeats == 0 {
        return Err(Error::config("permutation importance needs n_repeats >= 1"));
    }
    if schema.width() != test.width() {
        return Err(Error::config(format!(
            "schema width {} does not match test width {}",
            schema.width(),
            test.width()
        )));
    }
    let baseline = score(model, test, threshold, metric)?;

    let groups = schema.groups();
    let mut drops: Vec<Vec<f64>> = vec![Vec::with_capacity(n_repeats); groups.len()];
    for repeat in 0..n_repeats {
        let mut rng = DetRng::new(seed, streams::IMPORTANCE + repeat as u64);
        let mut perm: Vec<usize> = (0..test.rows()).collect();
        rng.shuffle(&mut perm);
        for (g_idx, group) in groups.iter().enumerate() {
            let permuted = permute_group(test, group.start, group.len, &perm);
            let metric_value = score(model, &permuted, threshold, metric)?;
            drops[g_idx].push(baseline - metric_value);
        }
    }

    let mut importances: Vec<GroupImportance> = groups
        .iter()
        .zip(&drops)
        .map(|(group, values)| {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / values.len() as f64;
            GroupImportance {
                group: group.name.clone(),
                label: group.label.clone(),
                mean,
                std: var.sqrt(),
            }
        })
        .collect();
    importances.sort_by(|a, b| b.mean.total_cmp(&a.mean));
    Ok(importances)
}

/// Diagnostic alternative to permutation importance: the share of absolute
/// weight mass each group carries, averaged over the given weight vectors
/// (each normalized to sum 1 first).
pub fn weight_mass_by_group(
    schema: &FeatureSchema,
    weight_sets: &[&[f64]],
) -> Result<Vec<(String, f64)>> {
    let mut masses = vec![0.0f64; schema.groups().len()];
    for weights in weight_sets {
        if weights.len() != schema.width() {
            return Err(Error::config(format!(
                "weight vector length {} does not match schema width {}",
                weights.len(),
                schema.width()
            )));
        }
        let total: f64 = weights.iter().map(|w| w.abs()).sum();
        if total == 0.0 {
            continue;
        }
        for (g_idx, group) in schema.groups().iter().enumerate() {
            let group_mass: f64 = weights[group.start..group.start + group.len]
                .iter()
                .map(|w| w.abs())
                .sum();
            masses[g_idx] += group_mass / total;
        }
    }
    let k = weight_sets.len().max(1) as f64;
    let mut out: Vec<(String, f64)> = schema
        .groups()
        .iter()
        .zip(&masses)
        .map(|(g, &m)| (g.name.clone(), m / k))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(out)
}
