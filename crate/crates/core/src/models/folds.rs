//! Seeded stratified k-fold assignment.

use crate::error::{Error, Result};
use crate::rng::DetRng;

/// Split indices 0..n into k stratified folds: each class is shuffled with
/// the given generator and dealt round-robin, so folds differ in size by at
/// most one per class. Errors if any fold ends up missing a class.
pub fn stratified_k_folds(y: &[u8], k: usize, rng: &mut DetRng) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::config("k_folds must be at least 2"));
    }
    if y.len() < k {
        return Err(Error::config(format!(
            "cannot build {k} folds from {} rows",
            y.len()
        )));
    }

    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for class in [0u8, 1] {
        let mut indices: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        rng.shuffle(&mut indices);
        for (pos, idx) in indices.into_iter().enumerate() {
            folds[pos % k].push(idx);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }

    for (i, fold) in folds.iter().enumerate() {
        let pos = fold.iter().filter(|&&idx| y[idx] == 1).count();
        if pos == 0 || pos == fold.len() {
            return Err(Error::config(format!(
                "fold {i} is missing a class; reduce k_folds (a class has fewer than {k} rows)"
            )));
        }
    }
    Ok(folds)
}

/// Complement of a fold: every index not in it, ascending.
pub fn fold_complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut in_fold = vec![false; n];
    for &i in fold {
        in_fold[i] = true;
    }
    (0..n).filter(|&i| !in_fold[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition_all_indices() {
        let y: Vec<u8> = (0..37).map(|i| u8::from(i % 3 == 0)).collect();
        let mut rng = DetRng::new(4, 0);
        let folds = stratified_k_folds(&y, 5, &mut rng).unwrap();
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
    }

    #[test]
    fn every_fold_has_both_classes() {
        let y: Vec<u8> = (0..50).map(|i| u8::from(i < 10)).collect();
        let mut rng = DetRng::new(8, 0);
        for fold in stratified_k_folds(&y, 5, &mut rng).unwrap() {
            let pos = fold.iter().filter(|&&i| y[i] == 1).count();
            assert!(pos >= 1 && pos < fold.len());
        }
    }

    #[test]
    fn too_few_minority_rows_error() {
        let y: Vec<u8> = (0..20).map(|i| u8::from(i < 2)).collect();
        let mut rng = DetRng::new(8, 0);
        assert!(stratified_k_folds(&y, 5, &mut rng).is_err());
    }

    #[test]
    fn complement_is_exact() {
        assert_eq!(fold_complement(5, &[1, 3]), vec![0, 2, 4]);
    }
}
