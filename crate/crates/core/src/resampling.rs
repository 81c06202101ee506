//! SMOTE minority oversampling, applied to the training split only.
//!
//! Each synthetic sample is `a + u·(b − a)` for a minority row `a`, one of
//! its k nearest minority neighbors `b` (Euclidean distance, ties broken by
//! lower row index), and `u` uniform in [0, 1). Base rows cycle round-robin
//! over a seeded shuffle of the minority indices, so a fixed seed gives a
//! bit-identical result.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::rng::{streams, DetRng};

/// How far the minority class is oversampled.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoteTarget {
    /// Synthesize until both classes are exactly equal (the default).
    #[default]
    Equalize,
    /// Synthesize until minority count = ratio · majority count; values in
    /// (0, 1]. Ratios at or below the existing imbalance are a no-op.
    Ratio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    pub target: SmoteTarget,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            target: SmoteTarget::Equalize,
            seed: 0,
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the k nearest neighbors of `which` among `points`, excluding
/// itself. Ties in distance break toward the lower index.
fn k_nearest(points: &[&[f64]], which: usize, k: usize) -> Vec<usize> {
    let mut candidates: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != which)
        .map(|(j, p)| (squared_distance(points[which], p), j))
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    candidates.truncate(k);
    candidates.into_iter().map(|(_, j)| j).collect()
}

/// Oversample the minority class until both classes are equally sized.
///
/// The output starts with the original rows, bit-identical and in order,
/// followed by the synthetic minority rows. If classes are already balanced
/// the input is returned unchanged.
pub fn smote(train: &FeatureMatrix, config: &SmoteConfig) -> Result<FeatureMatrix> {
    if config.k_neighbors == 0 {
        return Err(Error::config("smote: k_neighbors must be at least 1"));
    }
    let labels = train.labels_or_err()?;
    let positives: Vec<usize> = (0..train.rows()).filter(|&i| labels[i] == 1).collect();
    let negatives: Vec<usize> = (0..train.rows()).filter(|&i| labels[i] == 0).collect();
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::config(
            "smote: both classes must be present in the training split",
        ));
    }
    if positives.len() == negatives.len() {
        return Ok(train.clone());
    }
    let (minority_label, minority_idx, majority_len) = if positives.len() < negatives.len() {
        (1u8, positives, negatives.len())
    } else {
        (0u8, negatives, positives.len())
    };
    if minority_idx.len() < 2 {
        return Err(Error::config(format!(
            "smote: minority class has {} row(s); need at least 2",
            minority_idx.len()
        )));
    }

    let target_count = match config.target {
        SmoteTarget::Equalize => majority_len,
        SmoteTarget::Ratio(r) => {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::config(format!(
                    "smote: target ratio must be in (0, 1], got {r}"
                )));
            }
            (r * majority_len as f64).round() as usize
        }
    };
    if target_count <= minority_idx.len() {
        return Ok(train.clone());
    }
    let synthetic_count = target_count - minority_idx.len();
    let k = config.k_neighbors.min(minority_idx.len() - 1);

    let minority_rows: Vec<&[f64]> = minority_idx.iter().map(|&i| train.row(i)).collect();
    let neighbors: Vec<Vec<usize>> = (0..minority_rows.len())
        .map(|i| k_nearest(&minority_rows, i, k))
        .collect();

    let mut rng = DetRng::new(config.seed, streams::SMOTE);
    let mut base_order: Vec<usize> = (0..minority_rows.len()).collect();
    rng.shuffle(&mut base_order);

    let mut out = train.clone();
    let mut out_labels = out.labels.take().expect("labels checked above");
    for t in 0..synthetic_count {
        let a = base_order[t % base_order.len()];
        let b = neighbors[a][rng.below(k as u64) as usize];
        let u = rng.uniform();
        let row_a = minority_rows[a];
        let row_b = minority_rows[b];
        let synthetic: Vec<f64> = row_a
            .iter()
            .zip(row_b)
            .map(|(x, y)| x + u * (y - x))
            .collect();
        out.push_row(&synthetic)?;
        out_labels.push(minority_label);
    }
    out.labels = Some(out_labels);
    Ok(out)
}
