//! Feature/target views over the dataset, plus standardization helpers.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

/// Training rows: the two model inputs (angle of attack, Mach) and a target.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainData {
    pub x: Vec<[f64; 2]>,
    pub y: Vec<f64>,
}

impl TrainData {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Gather the rows at `indices` from a dataset, using its target kind.
    pub fn gather(dataset: &Dataset, indices: &[usize]) -> Self {
        let mut x = Vec::with_capacity(indices.len());
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            let o = &dataset.observations[i];
            x.push(o.x());
            y.push(o.target(dataset.target));
        }
        TrainData { x, y }
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        TrainData {
            x: indices.iter().map(|&i| self.x[i]).collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
        }
    }
}

/// Per-feature affine standardization. Constant features keep scale 1 so the
/// transform never produces non-finite values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: [f64; 2],
    pub scale: [f64; 2],
}

impl Standardizer {
    pub fn fit(x: &[[f64; 2]]) -> Self {
        let n = x.len().max(1) as f64;
        let mut mean = [0.0; 2];
        for row in x {
            mean[0] += row[0];
            mean[1] += row[1];
        }
        mean[0] /= n;
        mean[1] /= n;
        let mut var = [0.0; 2];
        for row in x {
            var[0] += (row[0] - mean[0]) * (row[0] - mean[0]);
            var[1] += (row[1] - mean[1]) * (row[1] - mean[1]);
        }
        let scale = [
            (var[0] / n).sqrt().max(f64::MIN_POSITIVE).max(1e-300),
            (var[1] / n).sqrt().max(f64::MIN_POSITIVE).max(1e-300),
        ];
        let scale = [
            if scale[0] < 1e-150 { 1.0 } else { scale[0] },
            if scale[1] < 1e-150 { 1.0 } else { scale[1] },
        ];
        Standardizer { mean, scale }
    }

    pub fn apply(&self, row: [f64; 2]) -> [f64; 2] {
        [(row[0] - self.mean[0]) / self.scale[0], (row[1] - self.mean[1]) / self.scale[1]]
    }
}

/// Target standardization for scale-sensitive fitters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetScaler {
    pub mean: f64,
    pub scale: f64,
}

impl TargetScaler {
    pub fn fit(y: &[f64]) -> Self {
        let n = y.len().max(1) as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        TargetScaler { mean, scale: if sd < 1e-150 { 1.0 } else { sd } }
    }

    pub fn forward(&self, y: f64) -> f64 {
        (y - self.mean) / self.scale
    }

    pub fn back(&self, y: f64) -> f64 {
        y * self.scale + self.mean
    }
}
