//! Random forest: bagged regression trees.
//!
//! Each tree fits a bootstrap resample; with only two features there is no
//! feature subsampling. Tree `i` draws its bootstrap from a stream derived
//! from `(seed, i)` alone, so the first `k` trees of an `n`-tree forest are
//! exactly the `k`-tree forest for the same seed. Cross-validation exploits
//! this prefix property to score every tree-count candidate from one pass.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::learn::tree::TreeModel;
use crate::rng;

const TAG_FOREST: u64 = 0xf0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    pub max_depth: usize,
    pub seed: u64,
}

impl ForestModel {
    pub fn fit(
        x: &[[f64; 2]],
        y: &[f64],
        max_depth: usize,
        n_trees: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = y.len();
        let trees: Result<Vec<TreeModel>> = (0..n_trees)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng::stream(seed, &[TAG_FOREST, i as u64]);
                let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                TreeModel::fit_on(x, y, &idx, max_depth)
            })
            .collect();
        Ok(ForestModel { trees: trees?, max_depth, seed })
    }

    pub fn predict_one(&self, row: [f64; 2]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_one(row)).sum();
        sum / self.trees.len() as f64
    }

    /// Running prediction sums after each tree, for prefix CV scoring:
    /// entry `k` holds the mean prediction of the first `k+1` trees for
    /// every row of `xs`.
    pub fn prefix_predictions(&self, xs: &[[f64; 2]]) -> Vec<Vec<f64>> {
        let mut sums = vec![0.0; xs.len()];
        let mut out = Vec::with_capacity(self.trees.len());
        for (k, tree) in self.trees.iter().enumerate() {
            for (s, &row) in sums.iter_mut().zip(xs) {
                *s += tree.predict_one(row);
            }
            out.push(sums.iter().map(|&s| s / (k + 1) as f64).collect());
        }
        out
    }
}
