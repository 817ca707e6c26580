//! k-nearest-neighbors regression on standardized features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::data::{Standardizer, TrainData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnnWeights {
    Uniform,
    Distance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub neighbors: usize,
    pub weights: KnnWeights,
    pub scaler: Standardizer,
    pub train_x: Vec<[f64; 2]>,
    pub train_y: Vec<f64>,
}

impl KnnModel {
    pub fn fit(data: &TrainData, neighbors: usize, weights: KnnWeights) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if neighbors == 0 || neighbors > data.len() {
            return Err(Error::Invalid(format!(
                "neighbors must be in 1..={}, got {neighbors}",
                data.len()
            )));
        }
        let scaler = Standardizer::fit(&data.x);
        Ok(KnnModel {
            neighbors,
            weights,
            scaler,
            train_x: data.x.iter().map(|&r| scaler.apply(r)).collect(),
            train_y: data.y.clone(),
        })
    }

    pub fn predict_one(&self, row: [f64; 2]) -> f64 {
        let u = self.scaler.apply(row);
        let mut dist: Vec<(f64, usize)> = self
            .train_x
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let dx = t[0] - u[0];
                let dy = t[1] - u[1];
                ((dx * dx + dy * dy).sqrt(), i)
            })
            .collect();
        // Stable ordering: ties in distance break by training index.
        dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let nearest = &dist[..self.neighbors];
        match self.weights {
            KnnWeights::Uniform => {
                nearest.iter().map(|&(_, i)| self.train_y[i]).sum::<f64>() / self.neighbors as f64
            }
            KnnWeights::Distance => {
                // Exact matches take over entirely.
                let zero: Vec<usize> =
                    nearest.iter().filter(|&&(d, _)| d == 0.0).map(|&(_, i)| i).collect();
                if !zero.is_empty() {
                    return zero.iter().map(|&i| self.train_y[i]).sum::<f64>() / zero.len() as f64;
                }
                let mut num = 0.0;
                let mut den = 0.0;
                for &(d, i) in nearest {
                    let w = 1.0 / d;
                    num += w * self.train_y[i];
                    den += w;
                }
                num / den
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> TrainData {
        TrainData {
            x: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            y: vec![1.0, 2.0, 3.0, 4.0],
        }
    }

    #[test]
    fn one_neighbor_on_a_training_point_returns_its_target() {
        for weights in [KnnWeights::Uniform, KnnWeights::Distance] {
            let m = KnnModel::fit(&data(), 1, weights).unwrap();
            assert_eq!(m.predict_one([1.0, 0.0]), 2.0);
            assert_eq!(m.predict_one([0.0, 1.0]), 3.0);
        }
    }

    #[test]
    fn uniform_average_over_k() {
        let m = KnnModel::fit(&data(), 4, KnnWeights::Uniform).unwrap();
        assert!((m.predict_one([0.5, 0.5]) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn distance_weights_favor_the_closer_point() {
        let m = KnnModel::fit(&data(), 2, KnnWeights::Distance).unwrap();
        // Closer to (0,0) than (1,0): prediction pulled toward y=1.
        let p = m.predict_one([0.2, 0.0]);
        assert!(p > 1.0 && p < 1.5, "p = {p}");
    }

    #[test]
    fn exact_match_dominates_distance_weighting() {
        let m = KnnModel::fit(&data(), 3, KnnWeights::Distance).unwrap();
        assert_eq!(m.predict_one([0.0, 0.0]), 1.0);
    }

    #[test]
    fn too_many_neighbors_is_an_error() {
        assert!(KnnModel::fit(&data(), 5, KnnWeights::Uniform).is_err());
        assert!(KnnModel::fit(&data(), 0, KnnWeights::Uniform).is_err());
    }
}
