//! Stacked ensemble: logistic regression and calibrated SVM base learners,
//! out-of-fold probability meta-features, and a logistic meta-learner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureSchema};
use crate::rng::{streams, DetRng};

use super::folds::{fold_complement, stratified_k_folds};
use super::logistic::train_logistic;
use super::platt::platt_calibrate;
use super::svm::train_svm;
use super::{Calibration, Hyper, LinearModel, Predictor};

/// Base learners refit on the full training set plus the meta-learner over
/// their two probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackModel {
    pub logistic: LinearModel,
    pub svm: LinearModel,
    pub meta: LinearModel,
    pub folds: usize,
}

impl StackModel {
    pub fn width(&self) -> usize {
        self.logistic.weights.len()
    }
}

impl Predictor for StackModel {
    fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        predict_stack(self, x)
    }

    fn width(&self) -> usize {
        StackModel::width(self)
    }
}

/// Train an SVM and calibrate its margins with Platt scaling fitted on
/// out-of-fold margins (up to `max_folds` stratified folds, clamped to the
/// minority class size).
pub fn train_svm_calibrated(
    x: &FeatureMatrix,
    y: &[u8],
    hyper: &Hyper,
    max_folds: usize,
    seed: u64,
    stream: u64,
) -> Result<LinearModel> {
    super::check_training_input(x, y)?;
    let minority = y
        .iter()
        .filter(|&&v| v == 1)
        .count()
        .min(y.iter().filter(|&&v| v == 0).count());
    let k = max_folds.min(minority).max(2);

    let mut rng = DetRng::new(seed, stream);
    let folds = stratified_k_folds(y, k, &mut rng)?;

    let mut margins = vec![0.0; y.len()];
    for fold in &folds {
        let train_idx = fold_complement(x.rows(), fold);
        let xt = x.subset(&train_idx);
        let yt: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();
        let fold_model = train_svm(&xt, &yt, hyper)?.model;
        for &i in fold {
            margins[i] = fold_model.margin(x.row(i))?;
        }
    }

    let (a, b) = platt_calibrate(&margins, y)?;
    let mut model = train_svm(x, y, hyper)?.model;
    model.calibration = Some(Calibration { a, b });
    Ok(model)
}

/// Train the stacked ensemble.
///
/// Out-of-fold probabilities from both base learners over seeded stratified
/// k-folds feed the logistic meta-learner; the base learners are then refit
/// on the full training set for inference.
pub fn train_stack(
    x: &FeatureMatrix,
    y: &[u8],
    k_folds: usize,
    hyper_logistic: &Hyper,
    hyper_svm: &Hyper,
    seed: u64,
) -> Result<StackModel> {
    super::check_training_input(x, y)?;
    if x.rows() < 2 * k_folds {
        return Err(Error::config(format!(
            "stacking needs at least {} rows for {k_folds} folds, got {}",
            2 * k_folds,
            x.rows()
        )));
    }

    let mut rng = DetRng::new(seed, streams::STACK_FOLDS);
    let folds = stratified_k_folds(y, k_folds, &mut rng)?;

    let mut oof = vec![[0.0f64; 2]; x.rows()];
    for (f_idx, fold) in folds.iter().enumerate() {
        let train_idx = fold_complement(x.rows(), fold);
        let xt = x.subset(&train_idx);
        let yt: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();

        let lr = train_logistic(&xt, &yt, hyper_logistic)?.model;
        let svm = train_svm_calibrated(
            &xt,
            &yt,
            hyper_svm,
            5,
            seed,
            streams::CALIBRATION + f_idx as u64,
        )?;
        for &i in fold {
            oof[i] = [lr.predict_proba(x.row(i))?, svm.predict_proba(x.row(i))?];
        }
    }

    let meta_x = FeatureMatrix::from_rows(
        FeatureSchema::raw(2),
        oof.iter().map(|p| p.to_vec()).collect(),
    )?;
    let meta = train_logistic(&meta_x, y, hyper_logistic)?.model;

    let logistic = train_logistic(x, y, hyper_logistic)?.model;
    let svm = train_svm_calibrated(
        x,
        y,
        hyper_svm,
        5,
        seed,
        streams::CALIBRATION + k_folds as u64,
    )?;

    Ok(StackModel {
        logistic,
        svm,
        meta,
        folds: k_folds,
    })
}

/// Meta probability over the two base probabilities.
pub fn predict_stack(model: &StackModel, x: &[f64]) -> Result<f64> {
    let p_lr = model.logistic.predict_proba(x)?;
    let p_svm = model.svm.predict_proba(x)?;
    model.meta.predict_proba(&[p_lr, p_svm])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{sigmoid, ModelKind};

    fn separable_data(n: usize) -> (FeatureMatrix, Vec<u8>) {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let side = if i % 2 == 0 { -1.0 } else { 1.0 };
                vec![
                    side * (1.0 + (i as f64) * 0.01),
                    side * 0.5 + (i as f64 % 5.0) * 0.02,
                ]
            })
            .collect();
        let y: Vec<u8> = (0..n).map(|i| u8::from(i % 2 == 1)).collect();
        (
            FeatureMatrix::from_rows(FeatureSchema::raw(2), rows).unwrap(),
            y,
        )
    }

    #[test]
    fn stack_learns_separable_data() {
        let (x, y) = separable_data(60);
        let model = train_stack(&x, &y, 5, &Hyper::default(), &Hyper::default(), 7).unwrap();
        for (row, &label) in x.iter_rows().zip(&y) {
            let p = predict_stack(&model, row).unwrap();
            assert_eq!(u8::from(p >= 0.5), label, "row {row:?}, p = {p}");
            assert!(p > 0.0 && p < 1.0);
        }
    }

    #[test]
    fn stack_is_seed_deterministic() {
        let (x, y) = separable_data(40);
        let a = train_stack(&x, &y, 4, &Hyper::default(), &Hyper::default(), 11).unwrap();
        let b = train_stack(&x, &y, 4, &Hyper::default(), &Hyper::default(), 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn prediction_matches_hand_computed_meta_sigmoid() {
        let (x, y) = separable_data(40);
        let model = train_stack(&x, &y, 4, &Hyper::default(), &Hyper::default(), 3).unwrap();
        let row = x.row(5);
        let p_lr = model.logistic.predict_proba(row).unwrap();
        let p_svm = model.svm.predict_proba(row).unwrap();
        let by_hand = sigmoid(
            model.meta.weights[0] * p_lr + model.meta.weights[1] * p_svm + model.meta.bias,
        );
        assert_eq!(predict_stack(&model, row).unwrap(), by_hand);
    }

    #[test]
    fn zero_meta_gives_half_regardless_of_bases() {
        let (x, y) = separable_data(40);
        let mut model = train_stack(&x, &y, 4, &Hyper::default(), &Hyper::default(), 3).unwrap();
        model.meta.weights = vec![0.0, 0.0];
        model.meta.bias = 0.0;
        for i in 0..5 {
            assert_eq!(predict_stack(&model, x.row(i)).unwrap(), 0.5);
        }
    }

    #[test]
    fn meta_dominant_in_first_base_is_monotone_in_it() {
        let (x, y) = separable_data(40);
        let mut model = train_stack(&x, &y, 4, &Hyper::default(), &Hyper::default(), 3).unwrap();
        model.meta.weights = vec![10.0, 0.0];
        model.meta.bias = -5.0;
        // Probe the meta directly over a grid of p_lr values.
        let mut last = -1.0;
        for i in 0..=10 {
            let p_lr = i as f64 / 10.0;
            let p = model.meta.predict_proba(&[p_lr, 0.42]).unwrap();
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn too_few_rows_for_folds_is_an_error() {
        let (x, y) = separable_data(8);
        assert!(train_stack(&x, &y, 5, &Hyper::default(), &Hyper::default(), 1).is_err());
    }

    #[test]
    fn identical_base_probabilities_make_meta_monotone_in_them() {
        // Meta-learner trained on two identical probability columns: its
        // prediction must be a monotone function of the shared probability.
        let shared: Vec<f64> = (0..40).map(|i| 0.05 + 0.9 * (i as f64) / 39.0).collect();
        let rows: Vec<Vec<f64>> = shared.iter().map(|&p| vec![p, p]).collect();
        let y: Vec<u8> = shared.iter().map(|&p| u8::from(p > 0.5)).collect();
        let meta_x = FeatureMatrix::from_rows(FeatureSchema::raw(2), rows).unwrap();
        let meta = crate::models::train_logistic(&meta_x, &y, &Hyper::default())
            .unwrap()
            .model;
        let mut last = -1.0;
        for &p in &shared {
            let out = meta.predict_proba(&[p, p]).unwrap();
            assert!(out > last, "meta not monotone at p = {p}");
            last = out;
        }
    }

    #[test]
    fn calibrated_svm_has_calibration_and_kind() {
        let (x, y) = separable_data(30);
        let model = train_svm_calibrated(&x, &y, &Hyper::default(), 5, 2, 0x100).unwrap();
        assert_eq!(model.kind, ModelKind::Svm);
        assert!(model.calibration.is_some());
        let p = model.predict_proba(x.row(0)).unwrap();
        assert!(p > 0.0 && p < 1.0);
    }
}
