use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::rng::SeedStream;

/// Assignment of every instance to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn n(&self) -> usize {
        self.assignments.len()
    }

    /// Held-out indices of fold `f`, ascending.
    pub fn test_indices(&self, f: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.assignments[i] == f).collect()
    }

    /// Training indices for fold `f` (everything not held out), ascending.
    pub fn train_indices(&self, f: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.assignments[i] != f).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// 10 folds for `n >= 100`, otherwise 5 (capped at `n`).
pub fn default_folds(n: usize) -> usize {
    if n >= 100 {
        10
    } else {
        5.min(n)
    }
}

/// Shuffles `0..n` with the seed and deals indices round-robin into `k`
/// folds, so fold sizes differ by at most one.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan, IngestError> {
    if k < 2 || k > n {
        return Err(IngestError::BadFoldCount { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut SeedStream::new(seed).child("kfold").rng());
    let mut assignments = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan { k, assignments })
}
