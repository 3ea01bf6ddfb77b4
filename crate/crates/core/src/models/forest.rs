use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{Columns, FeatureSampler, RegressionTree, TreeParams};
use crate::matrix::Matrix;
use crate::rng::SeedStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per split; `None` uses `max(1, p / 3)`.
    #[serde(default)]
    pub mtry: Option<usize>,
    pub bootstrap: bool,
    #[serde(default)]
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl ForestParams {
    pub fn resolved_mtry(&self, p: usize) -> usize {
        self.mtry.unwrap_or((p / 3).max(1)).clamp(1, p.max(1))
    }

    fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<RegressionTree>,
    pub mtry: usize,
}

impl RandomForest {
    /// Each tree draws from its own substream `seed / "tree" / t`, so the
    /// forest is identical whether trees are grown serially or in parallel.
    pub fn fit(x: &Matrix, y: &[f64], params: &ForestParams, seed: SeedStream) -> RandomForest {
        let n = y.len();
        let p = x.ncols();
        let mtry = params.resolved_mtry(p);
        let cols = Columns::new(x);
        let trees = (0..params.n_trees as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed.child("tree").index(t).rng();
                let rows: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let sampler = FeatureSampler { rng: &mut rng, mtry };
                RegressionTree::grow(&cols, y, rows, params.tree_params(), Some(sampler))
            })
            .collect();
        RandomForest { trees, mtry }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
        sum / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn deterministic_given_seed() {
        let x = Matrix::from_vec(20, 2, (0..40).map(|v| (v * 7 % 13) as f64).collect());
        let y: Vec<f64> = (0..20).map(|v| (v as f64).sqrt()).collect();
        let params = ForestParams {
            n_trees: 10,
            mtry: Some(1),
            bootstrap: true,
            max_depth: None,
            min_samples_leaf: 1,
        };
        let a = RandomForest::fit(&x, &y, &params, SeedStream::new(3));
        let b = RandomForest::fit(&x, &y, &params, SeedStream::new(3));
        assert_eq!(a, b);
        let c = RandomForest::fit(&x, &y, &params, SeedStream::new(4));
        assert_ne!(a, c);
    }

    proptest! {
        #[test]
        fn single_unbagged_full_mtry_tree_equals_cart(
            (n, p) in (3usize..25, 1usize..5),
            seed in any::<u64>(),
            leaf in 1usize..3,
        ) {
            let mut rng = SeedStream::new(seed).rng();
            let x = Matrix::from_vec(n, p, (0..n * p).map(|_| rng.gen_range(0..5) as f64).collect());
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let params = ForestParams { n_trees: 1, mtry: Some(p), bootstrap: false, max_depth: None, min_samples_leaf: leaf };
            let forest = RandomForest::fit(&x, &y, &params, SeedStream::new(seed));
            let tree = RegressionTree::fit(&x, &y, TreeParams { max_depth: None, min_samples_leaf: leaf });
            prop_assert_eq!(&forest.trees[0], &tree);
            for r in 0..n {
                prop_assert_eq!(forest.predict_row(x.row(r)), tree.predict_row(x.row(r)));
            }
        }
    }
}
