//! Stratified cross-validation fold plans.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// K disjoint test sets that together cover every row, with each class
/// spread across folds to within one record of proportionality.
#[derive(Debug, Clone)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Fold>,
}

pub fn stratified_folds(data: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "cross validation needs k >= 2, got {k}"
        )));
    }
    let labels = data.class_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tests: Vec<Vec<usize>> = vec![Vec::new(); k];
    for label in &labels {
        let mut members: Vec<usize> = (0..data.n_rows())
            .filter(|&i| data.decision_label(i) == label)
            .collect();
        if members.len() < k {
            return Err(Error::InvalidArgument(format!(
                "class {:?} has {} records, fewer than k = {k}",
                label,
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for (pos, row) in members.into_iter().enumerate() {
            tests[pos % k].push(row);
        }
    }
    let folds = tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let train = (0..data.n_rows()).filter(|i| !test.contains(i)).collect();
            Fold { train, test }
        })
        .collect();
    Ok(FoldPlan { k, seed, folds })
}
