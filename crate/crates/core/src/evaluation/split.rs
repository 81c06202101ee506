//! Seeded train/test splitting.

use crate::corpus::{BillRecord, Outcome};
use crate::error::{Error, Result};
use crate::rng::{streams, DetRng};

/// Split indices 0..n into (train, test), train size = round(ratio·n).
///
/// Stratified mode preserves the class ratio within ±1 record per class
/// (largest-remainder assignment, ties toward class 0). Both halves come
/// back in ascending index order; the partition is exact and seeded.
pub fn train_test_split(
    labels: &[u8],
    ratio: f64,
    seed: u64,
    stratified: bool,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = labels.len();
    if n < 10 {
        return Err(Error::config(format!(
            "split needs at least 10 records, got {n}"
        )));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::config(format!(
            "split ratio must be in (0, 1), got {ratio}"
        )));
    }
    let train_n = ((n as f64) * ratio).round() as usize;
    if train_n == 0 || train_n == n {
        return Err(Error::config(format!(
            "split ratio {ratio} leaves an empty side for {n} records"
        )));
    }

    let mut rng = DetRng::new(seed, streams::SPLIT);
    let mut train: Vec<usize>;
    let mut test: Vec<usize>;

    if stratified {
        let mut class0: Vec<usize> = (0..n).filter(|&i| labels[i] == 0).collect();
        let mut class1: Vec<usize> = (0..n).filter(|&i| labels[i] == 1).collect();
        if class0.len() < 2 || class1.len() < 2 {
            return Err(Error::config(
                "stratified split needs at least 2 records of each class",
            ));
        }
        // Largest-remainder targets per class; the leftover train slot (if
        // any) goes to the class with the larger fractional part, class 0
        // on ties.
        let t0 = ratio * class0.len() as f64;
        let t1 = ratio * class1.len() as f64;
        let mut take0 = t0.floor() as usize;
        let mut take1 = t1.floor() as usize;
        while take0 + take1 < train_n {
            if t0 - take0 as f64 >= t1 - take1 as f64 {
                take0 += 1;
            } else {
                take1 += 1;
            }
        }
        while take0 + take1 > train_n {
            if t0 - take0 as f64 <= t1 - take1 as f64 {
                take0 -= 1;
            } else {
                take1 -= 1;
            }
        }
        if take0 == 0 || take1 == 0 || take0 >= class0.len() || take1 >= class1.len() {
            return Err(Error::config(
                "stratified split leaves a class absent from one side; adjust the ratio",
            ));
        }
        rng.shuffle(&mut class0);
        rng.shuffle(&mut class1);
        train = class0[..take0].to_vec();
        train.extend_from_slice(&class1[..take1]);
        test = class0[take0..].to_vec();
        test.extend_from_slice(&class1[take1..]);
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        train = order[..train_n].to_vec();
        test = order[train_n..].to_vec();
    }

    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Split records into (train, test) lists. Stratification requires every
/// outcome to be known.
pub fn split_records(
    records: &[BillRecord],
    ratio: f64,
    seed: u64,
    stratified: bool,
) -> Result<(Vec<BillRecord>, Vec<BillRecord>)> {
    let labels: Vec<u8> = if stratified {
        let mut labels = Vec::with_capacity(records.len());
        for r in records {
            match r.outcome {
                Outcome::Enacted => labels.push(1),
                Outcome::NotEnacted => labels.push(0),
                Outcome::Unknown => {
                    return Err(Error::config(format!(
                        "record {:?} has unknown outcome; stratified splitting needs labels",
                        r.id
                    )));
                }
            }
        }
        labels
    } else {
        vec![0; records.len()]
    };

    // Unstratified mode must not trip the two-per-class check.
    let (train_idx, test_idx) = if stratified {
        train_test_split(&labels, ratio, seed, true)?
    } else {
        train_test_split(&labels, ratio, seed, false)?
    };
    let pick = |idx: &[usize]| idx.iter().map(|&i| records[i].clone()).collect();
    Ok((pick(&train_idx), pick(&test_idx)))
}
