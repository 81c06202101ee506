//! End-to-end pipeline orchestration shared by the CLI subcommands:
//! split → featurize → fit scaler → scale → SMOTE → train base learners →
//! calibrate → stack, plus evaluation, prediction, importance, and the
//! oversampling ablation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::corpus::{parse_corpus, BillRecord, Outcome};
use crate::embeddings::load_embeddings;
use crate::error::{Error, Result};
use crate::evaluation::{
    evaluate, permutation_importance, split_records, weight_mass_by_group, AblationReport,
    EvaluationReport, GroupImportance, ImportanceMetric,
};
use crate::features::{
    apply_scaler, fit_scaler, FeatureMatrix, FeatureSpace, Representation, Scaler,
};
use crate::models::{train_stack, Predictor, StackModel};
use crate::persist::{
    file_digest, load_model, model_id, ModelPayload, SeedSet, SplitSettings, TrainPrediction,
};
use crate::resampling::smote;

pub const MODEL_DISPLAY_NAMES: [&str; 3] = [
    "Logistic Regression",
    "Support Vector Machine",
    "Stacked Ensemble",
];

/// Parse the training corpus and require every outcome to be known.
fn load_labelled_corpus(path: &Path) -> Result<(Vec<BillRecord>, String)> {
    let records = parse_corpus(path)?;
    let unknown: Vec<&str> = records
        .iter()
        .filter(|r| r.outcome == Outcome::Unknown)
        .map(|r| r.id.as_str())
        .collect();
    if !unknown.is_empty() {
        return Err(Error::config(format!(
            "{} record(s) have unknown outcome (e.g. {:?}); labelled corpora are required here",
            unknown.len(),
            &unknown[..unknown.len().min(5)]
        )));
    }
    let digest = file_digest(path)?;
    Ok((records, digest))
}

/// Build the feature space for the configured representation. The training
/// records are needed to fit the bag-of-words vocabulary.
fn build_feature_space(config: &RunConfig, train: &[BillRecord]) -> Result<FeatureSpace> {
    let feature_config = config.features.feature_config();
    match config.features.representation {
        Representation::Engineered => Ok(FeatureSpace::engineered(feature_config)),
        Representation::EngineeredWordvec => {
            let table = load_embeddings(&config.embeddings.path, config.embeddings.dim)
                .map_err(|e| e.with_stage("embeddings"))?;
            Ok(FeatureSpace::engineered_wordvec(feature_config, table))
        }
        Representation::Bow => {
            FeatureSpace::bow(feature_config, &config.features.bow_config(), train)
        }
    }
}

struct Prepared {
    space: FeatureSpace,
    scaler: Scaler,
    train_scaled: FeatureMatrix,
    test_scaled: FeatureMatrix,
}

fn prepare(config: &RunConfig, train: &[BillRecord], test: &[BillRecord]) -> Result<Prepared> {
    let space = build_feature_space(config, train)?;
    let train_matrix = space
        .featurize_corpus(train, true)
        .map_err(|e| e.with_stage("featurize"))?;
    let test_matrix = space
        .featurize_corpus(test, true)
        .map_err(|e| e.with_stage("featurize"))?;
    let scaler = fit_scaler(&train_matrix).map_err(|e| e.with_stage("scaler"))?;
    let train_scaled = apply_scaler(&scaler, &train_matrix).map_err(|e| e.with_stage("scaler"))?;
    let test_scaled = apply_scaler(&scaler, &test_matrix).map_err(|e| e.with_stage("scaler"))?;
    Ok(Prepared {
        space,
        scaler,
        train_scaled,
        test_scaled,
    })
}

fn fit_stack(
    config: &RunConfig,
    train_scaled: &FeatureMatrix,
    with_smote: bool,
) -> Result<(StackModel, usize)> {
    let train_final = if with_smote {
        smote(train_scaled, &config.smote.smote_config()).map_err(|e| e.with_stage("smote"))?
    } else {
        train_scaled.clone()
    };
    let labels = train_final.labels_or_err()?.to_vec();
    let stack = train_stack(
        &train_final,
        &labels,
        config.stack.folds,
        &config.logistic.hyper(config.stack.seed),
        &config.svm.hyper(config.stack.seed),
        config.stack.seed,
    )
    .map_err(|e| e.with_stage("train"))?;
    Ok((stack, train_final.rows()))
}

/// Reports for the two base learners and the stack on one test matrix.
pub fn evaluate_all(
    stack: &StackModel,
    test: &FeatureMatrix,
    threshold: f64,
    model_id: &str,
    config_digest: &str,
) -> Result<Vec<EvaluationReport>> {
    let models: [(&str, &dyn Predictor); 3] = [
        (MODEL_DISPLAY_NAMES[0], &stack.logistic),
        (MODEL_DISPLAY_NAMES[1], &stack.svm),
        (MODEL_DISPLAY_NAMES[2], stack),
    ];
    models
        .iter()
        .map(|(name, model)| evaluate(*model, name, test, threshold, model_id, config_digest))
        .collect()
}

#[derive(Debug)]
pub struct TrainOutput {
    pub payload: ModelPayload,
    pub summary: String,
}

/// Run the full training pipeline from the configured corpus.
pub fn train_pipeline(config: &RunConfig) -> Result<TrainOutput> {
    let (records, corpus_digest) =
        load_labelled_corpus(&config.data.corpus).map_err(|e| e.with_stage("corpus"))?;
    let (train_records, test_records) = split_records(
        &records,
        config.split.ratio,
        config.split.seed,
        config.split.stratified,
    )
    .map_err(|e| e.with_stage("split"))?;

    let prepared = prepare(config, &train_records, &test_records)?;
    let (stack, resampled_rows) = fit_stack(config, &prepared.train_scaled, config.smote.enabled)?;

    let train_predictions: Vec<TrainPrediction> = train_records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(TrainPrediction {
                id: r.id.clone(),
                probability: stack.predict_proba(prepared.train_scaled.row(i))?,
            })
        })
        .collect::<Result<_>>()?;

    let payload = ModelPayload {
        representation: config.features.representation,
        feature_config: config.features.feature_config(),
        embedding_dim: prepared.space.embedding_dim(),
        bow_vocab: prepared.space.bow_vocab().map(<[String]>::to_vec),
        schema: prepared.space.schema.clone(),
        scaler: prepared.scaler.clone(),
        stack,
        split: SplitSettings {
            ratio: config.split.ratio,
            stratified: config.split.stratified,
        },
        smote_enabled: config.smote.enabled,
        smote: config.smote.smote_config(),
        seeds: SeedSet {
            split: config.split.seed,
            smote: config.smote.seed,
            stack: config.stack.seed,
        },
        corpus_digest,
        config_digest: config.digest(),
        n_train: train_records.len(),
        train_predictions,
    };

    let enacted_train = train_records
        .iter()
        .filter(|r| r.outcome == Outcome::Enacted)
        .count();
    let mut summary = String::new();
    summary.push_str(&format!(
        "corpus: {} ({} records; train {} [{} enacted], test {})\n",
        config.data.corpus.display(),
        records.len(),
        train_records.len(),
        enacted_train,
        test_records.len(),
    ));
    summary.push_str(&format!(
        "representation: {}{}\n",
        config.features.representation.as_str(),
        match payload.embedding_dim {
            Some(d) => format!(" (dim {d})"),
            None => String::new(),
        }
    ));
    if let Some(vocab) = payload.bow_vocab.as_ref() {
        summary.push_str(&format!("bow vocabulary: {} tokens\n", vocab.len()));
    }
    summary.push_str(&format!("feature width: {}\n", payload.schema.width()));
    summary.push_str(&format!(
        "smote: {} (k={}, seed={}) → {} training rows\n",
        if config.smote.enabled { "on" } else { "off" },
        config.smote.k_neighbors,
        config.smote.seed,
        resampled_rows,
    ));
    for (name, model) in [
        ("logistic", &payload.stack.logistic),
        ("svm", &payload.stack.svm),
        ("meta", &payload.stack.meta),
    ] {
        summary.push_str(&format!(
            "{name}: lr={} l2={} iters={} final_loss={:.6}\n",
            model.hyper.learning_rate, model.hyper.l2_lambda, model.iterations, model.final_loss,
        ));
    }
    if let Some(cal) = payload.stack.svm.calibration {
        summary.push_str(&format!("svm calibration: a={:.6} b={:.6}\n", cal.a, cal.b));
    }
    summary.push_str(&format!(
        "seeds: split={} smote={} stack={}\n",
        payload.seeds.split, payload.seeds.smote, payload.seeds.stack
    ));
    summary.push_str(&format!("model id: {}\n", model_id(&payload)));
    summary.push_str(&format!("config digest: {}\n", payload.config_digest));
    summary.push_str("\n[effective config]\n");
    summary.push_str(&config.effective_toml());

    Ok(TrainOutput { payload, summary })
}

/// Rebuild the feature space recorded in a payload, loading embeddings from
/// the current configuration when the representation needs them.
fn space_from_payload(config: &RunConfig, payload: &ModelPayload) -> Result<FeatureSpace> {
    match payload.representation {
        Representation::Engineered => {
            Ok(FeatureSpace::engineered(payload.feature_config.clone()))
        }
        Representation::EngineeredWordvec => {
            let dim = payload
                .embedding_dim
                .ok_or_else(|| Error::integrity("model payload is missing the embedding dim"))?;
            let table = load_embeddings(&config.embeddings.path, dim)
                .map_err(|e| e.with_stage("embeddings"))?;
            Ok(FeatureSpace::engineered_wordvec(
                payload.feature_config.clone(),
                table,
            ))
        }
        Representation::Bow => {
            let vocab = payload
                .bow_vocab
                .clone()
                .ok_or_else(|| Error::integrity("model payload is missing the bow vocabulary"))?;
            Ok(FeatureSpace::bow_with_vocab(
                payload.feature_config.clone(),
                vocab,
            ))
        }
    }
}

/// Refuse to evaluate or predict with a model whose featurization settings
/// disagree with the current configuration.
fn check_compatibility(config: &RunConfig, payload: &ModelPayload) -> Result<()> {
    if payload.representation != config.features.representation {
        return Err(Error::integrity(format!(
            "model was trained with representation {:?}, config says {:?}",
            payload.representation.as_str(),
            config.features.representation.as_str()
        )));
    }
    if payload.feature_config != config.features.feature_config() {
        return Err(Error::integrity(
            "model feature config (election years / reference year) differs from the current \
             config; retrain or fix the config",
        ));
    }
    if payload.representation == Representation::EngineeredWordvec
        && payload.embedding_dim != Some(config.embeddings.dim)
    {
        return Err(Error::integrity(format!(
            "model expects embedding dim {:?}, config says {}",
            payload.embedding_dim, config.embeddings.dim
        )));
    }
    Ok(())
}

/// The test records a persisted model should be evaluated on: the explicit
/// test corpus when configured, otherwise the stored split replayed against
/// the (digest-checked) training corpus.
fn test_records_for(config: &RunConfig, payload: &ModelPayload) -> Result<Vec<BillRecord>> {
    if let Some(path) = config.data.test_corpus.as_ref() {
        let (records, _) = load_labelled_corpus(path)?;
        return Ok(records);
    }
    let (records, digest) = load_labelled_corpus(&config.data.corpus)?;
    if digest != payload.corpus_digest {
        return Err(Error::integrity(
            "training corpus changed since the model was trained; the stored split cannot be \
             replayed (set data.test_corpus to evaluate on an explicit file, or retrain)",
        ));
    }
    let (_, test_records) = split_records(
        &records,
        payload.split.ratio,
        payload.seeds.split,
        payload.split.stratified,
    )?;
    Ok(test_records)
}

#[derive(Debug)]
pub struct EvalOutput {
    pub reports: Vec<EvaluationReport>,
    pub model_id: String,
}

/// Evaluate a persisted model: per-model reports for both base learners and
/// the stack on the reconstructed (or explicit) test set.
pub fn evaluate_pipeline(config: &RunConfig, model_path: &Path) -> Result<EvalOutput> {
    let payload = load_model(model_path)?;
    check_compatibility(config, &payload)?;
    let test_records = test_records_for(config, &payload)?;
    let space = space_from_payload(config, &payload)?;
    let test_matrix = space.featurize_corpus(&test_records, true)?;
    let test_scaled = apply_scaler(&payload.scaler, &test_matrix)?;
    let id = model_id(&payload);
    let reports = evaluate_all(
        &payload.stack,
        &test_scaled,
        config.evaluate.threshold,
        &id,
        &payload.config_digest,
    )?;
    Ok(EvalOutput {
        reports,
        model_id: id,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub probability: f64,
    pub label: String,
}

/// Score a batch of bills (outcomes may be unknown) in input order.
pub fn predict_pipeline(
    config: &RunConfig,
    model_path: &Path,
    bills_path: &Path,
) -> Result<Vec<Prediction>> {
    let payload = load_model(model_path)?;
    check_compatibility(config, &payload)?;
    let bills = parse_corpus(bills_path)?;
    if bills.is_empty() {
        return Err(Error::config(format!(
            "{}: no bills to score",
            bills_path.display()
        )));
    }
    let space = space_from_payload(config, &payload)?;
    let matrix = space.featurize_corpus(&bills, false)?;
    let scaled = apply_scaler(&payload.scaler, &matrix)?;
    let mut out = Vec::with_capacity(bills.len());
    for (i, bill) in bills.iter().enumerate() {
        let p = payload.stack.predict_proba(scaled.row(i))?;
        out.push(Prediction {
            id: bill.id.clone(),
            probability: p,
            label: if p >= config.evaluate.threshold {
                "enacted".to_string()
            } else {
                "not_enacted".to_string()
            },
        });
    }
    Ok(out)
}

#[derive(Debug)]
pub struct ImportanceOutput {
    pub permutation: Vec<GroupImportance>,
    pub weight_mass: Vec<(String, f64)>,
    pub model_id: String,
}

/// Grouped permutation importance plus the weight-mass diagnostic for a
/// persisted model, on the same test set evaluation uses.
pub fn importance_pipeline(
    config: &RunConfig,
    model_path: &Path,
    seed_override: Option<u64>,
) -> Result<ImportanceOutput> {
    let payload = load_model(model_path)?;
    check_compatibility(config, &payload)?;
    let test_records = test_records_for(config, &payload)?;
    let space = space_from_payload(config, &payload)?;
    let test_matrix = space.featurize_corpus(&test_records, true)?;
    let test_scaled = apply_scaler(&payload.scaler, &test_matrix)?;

    let permutation = permutation_importance(
        &payload.stack,
        &test_scaled,
        &payload.schema,
        ImportanceMetric::MacroF1,
        config.importance.n_repeats,
        seed_override.unwrap_or(config.importance.seed),
        config.evaluate.threshold,
    )?;
    let weight_mass = weight_mass_by_group(
        &payload.schema,
        &[
            payload.stack.logistic.weights.as_slice(),
            payload.stack.svm.weights.as_slice(),
        ],
    )?;
    Ok(ImportanceOutput {
        permutation,
        weight_mass,
        model_id: model_id(&payload),
    })
}

/// Two full pipelines differing only in the SMOTE step, evaluated on the
/// same test split.
pub fn ablation_pipeline(config: &RunConfig) -> Result<AblationReport> {
    let (records, _) =
        load_labelled_corpus(&config.data.corpus).map_err(|e| e.with_stage("corpus"))?;
    let (train_records, test_records) = split_records(
        &records,
        config.split.ratio,
        config.split.seed,
        config.split.stratified,
    )
    .map_err(|e| e.with_stage("split"))?;
    let prepared = prepare(config, &train_records, &test_records)?;
    let digest = config.digest();

    let (stack_with, _) = fit_stack(config, &prepared.train_scaled, true)?;
    let with_reports = evaluate_all(
        &stack_with,
        &prepared.test_scaled,
        config.evaluate.threshold,
        "ablation-with",
        &digest,
    )?;
    let (stack_without, _) = fit_stack(config, &prepared.train_scaled, false)?;
    let without_reports = evaluate_all(
        &stack_without,
        &prepared.test_scaled,
        config.evaluate.threshold,
        "ablation-without",
        &digest,
    )?;
    AblationReport::from_pair(with_reports, without_reports)
}
