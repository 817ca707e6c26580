//! Least-squares gradient tree boosting with validation early stopping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::data::TrainData;
use crate::learn::tree::TreeModel;

/// Hard cap on boosting rounds.
pub const MAX_ROUNDS: usize = 5_000;
/// Rounds without validation improvement before stopping.
pub const PATIENCE: usize = 50;
/// Shrinkage applied to every tree.
pub const SHRINKAGE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub base: f64,
    pub shrinkage: f64,
    pub max_depth: usize,
    pub trees: Vec<TreeModel>,
    /// Rounds actually kept (best validation round).
    pub iterations: usize,
    pub stop_reason: StopReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EarlyStopping,
    MaxIterations,
}

impl GbtModel {
    /// Boost depth-limited trees on the residuals; track validation MSE and
    /// keep the model at its best round.
    pub fn fit(train: &TrainData, val: &TrainData, max_depth: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if val.is_empty() {
            return Err(Error::Invalid("gradient boosting needs a validation set".into()));
        }
        let base = train.y.iter().sum::<f64>() / train.len() as f64;
        let mut pred_train = vec![base; train.len()];
        let mut pred_val = vec![base; val.len()];
        let mut residual = vec![0.0; train.len()];
        let mut trees: Vec<TreeModel> = Vec::new();
        let mut best_mse = mse_of(&pred_val, &val.y);
        let mut best_round = 0usize;
        let mut stop_reason = StopReason::MaxIterations;
        for round in 1..=MAX_ROUNDS {
            for i in 0..train.len() {
                residual[i] = train.y[i] - pred_train[i];
            }
            let tree = TreeModel::fit(&train.x, &residual, max_depth)?;
            for (p, &row) in pred_train.iter_mut().zip(&train.x) {
                *p += SHRINKAGE * tree.predict_one(row);
            }
            for (p, &row) in pred_val.iter_mut().zip(&val.x) {
                *p += SHRINKAGE * tree.predict_one(row);
            }
            trees.push(tree);
            let val_mse = mse_of(&pred_val, &val.y);
            if val_mse < best_mse {
                best_mse = val_mse;
                best_round = round;
            } else if round - best_round >= PATIENCE {
                stop_reason = StopReason::EarlyStopping;
                break;
            }
        }
        trees.truncate(best_round);
        Ok(GbtModel {
            base,
            shrinkage: SHRINKAGE,
            max_depth,
            trees,
            iterations: best_round,
            stop_reason,
        })
    }

    pub fn predict_one(&self, row: [f64; 2]) -> f64 {
        self.base
            + self.shrinkage * self.trees.iter().map(|t| t.predict_one(row)).sum::<f64>()
    }
}

fn mse_of(pred: &[f64], y: &[f64]) -> f64 {
    pred.iter().zip(y).map(|(&p, &t)| (p - t) * (p - t)).sum::<f64>() / y.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split_data() -> (TrainData, TrainData) {
        let mut train = TrainData::default();
        let mut val = TrainData::default();
        for i in 0..400 {
            let a = 0.02 + 0.0003 * (i % 100) as f64;
            let m = 0.70 + 0.001 * (i % 80) as f64;
            let y = 0.02 + 0.4 * a + 0.1 * (m - 0.75) * (m - 0.75);
            if i % 5 == 0 {
                val.x.push([a, m]);
                val.y.push(y);
            } else {
                train.x.push([a, m]);
                train.y.push(y);
            }
        }
        (train, val)
    }

    #[test]
    fn boosting_improves_over_the_base_and_stops() {
        let (train, val) = split_data();
        let model = GbtModel::fit(&train, &val, 3).unwrap();
        assert!(model.iterations <= MAX_ROUNDS);
        assert!(!model.trees.is_empty());
        let base_mse = val
            .y
            .iter()
            .map(|&t| (t - model.base) * (t - model.base))
            .sum::<f64>()
            / val.len() as f64;
        let mse = val
            .x
            .iter()
            .zip(&val.y)
            .map(|(&row, &t)| (model.predict_one(row) - t).powi(2))
            .sum::<f64>()
            / val.len() as f64;
        assert!(mse < 0.05 * base_mse, "mse {mse} vs base {base_mse}");
    }

    #[test]
    fn kept_rounds_are_the_validation_optimum() {
        let (train, val) = split_data();
        let model = GbtModel::fit(&train, &val, 2).unwrap();
        // Replaying the boost must show no later round beating the kept one
        // within the patience window.
        let mut pred_val = vec![model.base; val.len()];
        let mut mses = vec![mse_of(&pred_val, &val.y)];
        for tree in &model.trees {
            for (p, &row) in pred_val.iter_mut().zip(&val.x) {
                *p += model.shrinkage * tree.predict_one(row);
            }
            mses.push(mse_of(&pred_val, &val.y));
        }
        let kept = *mses.last().unwrap();
        for &m in &mses {
            assert!(kept <= m + 1e-15);
        }
    }

    #[test]
    fn missing_validation_set_is_an_error() {
        let (train, _) = split_data();
        let empty = TrainData::default();
        assert!(GbtModel::fit(&train, &empty, 3).is_err());
    }
}
