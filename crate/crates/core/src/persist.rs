//! Model persistence: a versioned JSON document whose payload is protected
//! by a SHA-256 digest. Numbers round-trip at full precision; field order is
//! fixed by the struct definitions, so identical runs write identical bytes.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::hex_string;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureSchema, Representation, Scaler};
use crate::models::StackModel;
use crate::resampling::SmoteConfig;

pub const FORMAT_VERSION: u32 = 1;

/// Seeds that fed the training run; recorded for provenance and re-splitting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSet {
    pub split: u64,
    pub smote: u64,
    pub stack: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSettings {
    pub ratio: f64,
    pub stratified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainPrediction {
    pub id: String,
    pub probability: f64,
}

/// Everything needed to reproduce featurization and inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPayload {
    pub representation: Representation,
    pub feature_config: FeatureConfig,
    pub embedding_dim: Option<usize>,
    pub bow_vocab: Option<Vec<String>>,
    pub schema: FeatureSchema,
    pub scaler: Scaler,
    pub stack: StackModel,
    pub split: SplitSettings,
    pub smote_enabled: bool,
    pub smote: SmoteConfig,
    pub seeds: SeedSet,
    /// SHA-256 of the training corpus file bytes.
    pub corpus_digest: String,
    pub config_digest: String,
    pub n_train: usize,
    /// Stack probability for every training record, keyed by record id.
    pub train_predictions: Vec<TrainPrediction>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    digest: String,
    payload: ModelPayload,
}

fn payload_digest(payload: &ModelPayload) -> String {
    let bytes = serde_json::to_vec(payload).expect("payload serializes");
    hex_string(&Sha256::digest(&bytes))
}

/// Serialized model document with its digest. Stable bytes for stable input.
pub fn model_to_string(payload: &ModelPayload) -> String {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        digest: payload_digest(payload),
        payload: payload.clone(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("model file serializes");
    out.push('\n');
    out
}

pub fn save_model(path: &Path, payload: &ModelPayload) -> Result<()> {
    // Write via a temp file so a failed run leaves no partial output.
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, model_to_string(payload))
        .map_err(|e| Error::io(tmp.display().to_string(), e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Parse and verify a model document.
pub fn model_from_str(source: &str, content: &str) -> Result<ModelPayload> {
    let file: ModelFile = serde_json::from_str(content)
        .map_err(|e| Error::integrity(format!("{source}: unreadable model file: {e}")))?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::integrity(format!(
            "{source}: model format version {} is not supported (expected {FORMAT_VERSION})",
            file.format_version
        )));
    }
    let recomputed = payload_digest(&file.payload);
    if recomputed != file.digest {
        return Err(Error::integrity(format!(
            "{source}: model digest mismatch (file says {}, payload hashes to {recomputed})",
            file.digest
        )));
    }
    Ok(file.payload)
}

pub fn load_model(path: &Path) -> Result<ModelPayload> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    model_from_str(&path.display().to_string(), &content)
}

/// Short model identifier: a prefix of the payload digest.
pub fn model_id(payload: &ModelPayload) -> String {
    payload_digest(payload)[..12].to_string()
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(hex_string(&Sha256::digest(&bytes)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Calibration, Hyper, LinearModel, ModelKind};

    fn sample_payload() -> ModelPayload {
        let linear = |kind, calibration| LinearModel {
            kind,
            weights: vec![0.25, -1.5, 3.0e-7],
            bias: 0.125,
            hyper: Hyper::default(),
            calibration,
            final_loss: std::f64::consts::LN_2,
            iterations: 42,
        };
        let schema = FeatureSchema::engineered();
        let matrix = crate::features::FeatureMatrix::from_rows(
            FeatureSchema::raw(3),
            vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]],
        )
        .unwrap();
        ModelPayload {
            representation: Representation::Engineered,
            feature_config: FeatureConfig::default(),
            embedding_dim: None,
            bow_vocab: None,
            schema,
            scaler: crate::features::fit_scaler(&matrix).unwrap(),
            stack: StackModel {
                logistic: linear(ModelKind::Logistic, None),
                svm: linear(ModelKind::Svm, Some(Calibration { a: 1.25, b: -0.5 })),
                meta: LinearModel {
                    kind: ModelKind::Logistic,
                    weights: vec![2.0, 1.0],
                    bias: -1.5,
                    hyper: Hyper::default(),
                    calibration: None,
                    final_loss: 0.25,
                    iterations: 10,
                },
                folds: 5,
            },
            split: SplitSettings {
                ratio: 0.7,
                stratified: true,
            },
            smote_enabled: true,
            smote: SmoteConfig::default(),
            seeds: SeedSet {
                split: 17,
                smote: 23,
                stack: 31,
            },
            corpus_digest: "abc".to_string(),
            config_digest: "def".to_string(),
            n_train: 2,
            train_predictions: vec![TrainPrediction {
                id: "b1".to_string(),
                probability: 0.123456789012345,
            }],
        }
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let payload = sample_payload();
        let text = model_to_string(&payload);
        let back = model_from_str("test", &text).unwrap();
        assert_eq!(payload, back);
        // Serialization is stable: re-serializing gives identical bytes.
        assert_eq!(text, model_to_string(&back));
    }

    #[test]
    fn truncated_file_is_an_integrity_error() {
        let payload = sample_payload();
        let text = model_to_string(&payload);
        let truncated = &text[..text.len() / 2];
        let err = model_from_str("test", truncated).unwrap_err();
        assert_eq!(err.exit_code(), 5);
    }

    #[test]
    fn tampered_payload_is_detected() {
        let payload = sample_payload();
        let text = model_to_string(&payload);
        let tampered = text.replace("0.125", "0.126");
        let err = model_from_str("test", &tampered).unwrap_err();
        assert!(err.to_string().contains("digest mismatch"), "{err}");
    }

    #[test]
    fn model_id_is_digest_prefix() {
        let payload = sample_payload();
        assert_eq!(model_id(&payload).len(), 12);
    }
}
