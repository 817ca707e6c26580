//! Epsilon-insensitive support vector regression solved by sequential
//! minimal optimization.
//!
//! The dual is written over the doubled variable vector `[alpha; alpha*]`
//! with signs `z = [+1; -1]`, which reduces pair updates to the classic
//! maximal-violating-pair scheme: pick the worst KKT violator on each side,
//! move along the equality constraint, clip at the box. Features and targets
//! are standardized inside the model; `C` and `epsilon` apply to the
//! standardized problem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::data::{Standardizer, TargetScaler, TrainData};

pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_EPSILON: f64 = 0.01;
const KKT_TOL: f64 = 1e-3;
const MAX_ITER: usize = 200_000;
/// Curvature floor for non-positive-definite kernels (sigmoid).
const ETA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvrKernel {
    Linear,
    Polynomial,
    Gaussian,
    Sigmoid,
}

impl SvrKernel {
    fn eval(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let dot = a[0] * b[0] + a[1] * b[1];
        match self {
            SvrKernel::Linear => dot,
            SvrKernel::Polynomial => {
                let v = 0.5 * dot + 1.0;
                v * v * v
            }
            SvrKernel::Gaussian => {
                let dx = a[0] - b[0];
                let dy = a[1] - b[1];
                (-0.5 * (dx * dx + dy * dy)).exp()
            }
            SvrKernel::Sigmoid => (0.5 * dot).tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub kernel: SvrKernel,
    pub c: f64,
    pub epsilon: f64,
    pub x_scaler: Standardizer,
    pub y_scaler: TargetScaler,
    /// Standardized support vectors with their dual coefficients.
    pub support: Vec<([f64; 2], f64)>,
    pub bias: f64,
    pub iterations: usize,
}

impl SvrModel {
    pub fn fit(data: &TrainData, kernel: SvrKernel) -> Result<Self> {
        Self::fit_with(data, kernel, DEFAULT_C, DEFAULT_EPSILON)
    }

    pub fn fit_with(data: &TrainData, kernel: SvrKernel, c: f64, epsilon: f64) -> Result<Self> {
        let n = data.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let x_scaler = Standardizer::fit(&data.x);
        let y_scaler = TargetScaler::fit(&data.y);
        let u: Vec<[f64; 2]> = data.x.iter().map(|&r| x_scaler.apply(r)).collect();
        let y: Vec<f64> = data.y.iter().map(|&v| y_scaler.forward(v)).collect();

        // Base kernel matrix; dataset sizes here stay in the thousands.
        let gram: Vec<f64> = {
            let mut g = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = kernel.eval(u[i], u[j]);
                    g[i * n + j] = v;
                    g[j * n + i] = v;
                }
            }
            g
        };
        let kij = |a: usize, b: usize| gram[(a % n) * n + (b % n)];
        let z = |i: usize| if i < n { 1.0 } else { -1.0 };

        let m2 = 2 * n;
        let mut a = vec![0.0; m2];
        let mut grad: Vec<f64> = (0..m2)
            .map(|i| if i < n { epsilon - y[i] } else { epsilon + y[i - n] })
            .collect();

        let mut iterations = 0usize;
        let mut bias;
        loop {
            // Maximal violating pair.
            let mut i_best = usize::MAX;
            let mut m_up = f64::NEG_INFINITY;
            let mut j_best = usize::MAX;
            let mut m_low = f64::INFINITY;
            for k in 0..m2 {
                let zk = z(k);
                let v = -zk * grad[k];
                let in_up = (zk > 0.0 && a[k] < c) || (zk < 0.0 && a[k] > 0.0);
                let in_low = (zk > 0.0 && a[k] > 0.0) || (zk < 0.0 && a[k] < c);
                if in_up && v > m_up {
                    m_up = v;
                    i_best = k;
                }
                if in_low && v < m_low {
                    m_low = v;
                    j_best = k;
                }
            }
            bias = 0.5 * (m_up + m_low);
            if i_best == usize::MAX || j_best == usize::MAX || m_up - m_low < KKT_TOL {
                break;
            }
            if iterations >= MAX_ITER {
                break;
            }
            iterations += 1;

            let (i, j) = (i_best, j_best);
            let eta = (kij(i, i) + kij(j, j) - 2.0 * kij(i, j)).max(ETA_FLOOR);
            let mut step = (m_up - m_low) / eta;
            let room_i = if z(i) > 0.0 { c - a[i] } else { a[i] };
            let room_j = if z(j) > 0.0 { a[j] } else { c - a[j] };
            step = step.min(room_i).min(room_j);
            if step <= 0.0 {
                break;
            }
            a[i] += z(i) * step;
            a[j] -= z(j) * step;
            for k in 0..m2 {
                grad[k] += z(k) * step * (kij(k, i) - kij(k, j));
            }
        }

        let mut support = Vec::new();
        for i in 0..n {
            let beta = a[i] - a[i + n];
            if beta.abs() > 1e-12 {
                support.push((u[i], beta));
            }
        }
        Ok(SvrModel { kernel, c, epsilon, x_scaler, y_scaler, support, bias, iterations })
    }

    pub fn predict_one(&self, row: [f64; 2]) -> f64 {
        let u = self.x_scaler.apply(row);
        let raw: f64 =
            self.support.iter().map(|&(sv, beta)| beta * self.kernel.eval(sv, u)).sum::<f64>()
                + self.bias;
        self.y_scaler.back(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_data() -> TrainData {
        let mut d = TrainData::default();
        for i in 0..120 {
            let a = 0.02 + 0.0005 * (i % 40) as f64;
            let m = 0.70 + 0.002 * (i % 30) as f64;
            d.x.push([a, m]);
            d.y.push(5.0 * a + 2.0 * m - 1.0);
        }
        d
    }

    #[test]
    fn linear_kernel_fits_a_plane_within_epsilon() {
        let data = linear_data();
        let model = SvrModel::fit(&data, SvrKernel::Linear).unwrap();
        let y_sd = {
            let mean = data.y.iter().sum::<f64>() / data.len() as f64;
            (data.y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / data.len() as f64)
                .sqrt()
        };
        for (row, &t) in data.x.iter().zip(&data.y) {
            let p = model.predict_one(*row);
            // epsilon-insensitive fit: residuals near epsilon * sd(y).
            assert!((p - t).abs() < 3.0 * DEFAULT_EPSILON * y_sd + 1e-9, "{p} vs {t}");
        }
    }

    #[test]
    fn gaussian_kernel_tracks_a_smooth_surface() {
        let mut d = TrainData::default();
        for i in 0..15 {
            for j in 0..15 {
                let a = i as f64 / 14.0;
                let m = j as f64 / 14.0;
                d.x.push([a, m]);
                d.y.push((2.0 * a).sin() + m * m);
            }
        }
        let model = SvrModel::fit(&d, SvrKernel::Gaussian).unwrap();
        let mut sse = 0.0;
        let mut var = 0.0;
        let mean = d.y.iter().sum::<f64>() / d.len() as f64;
        for (row, &t) in d.x.iter().zip(&d.y) {
            sse += (model.predict_one(*row) - t).powi(2);
            var += (t - mean) * (t - mean);
        }
        assert!(sse < 0.05 * var, "sse {sse} var {var}");
    }

    #[test]
    fn duals_respect_the_box_and_balance() {
        let data = linear_data();
        let model = SvrModel::fit(&data, SvrKernel::Gaussian).unwrap();
        let sum: f64 = model.support.iter().map(|&(_, b)| b).sum();
        assert!(sum.abs() < 1e-6, "sum beta = {sum}");
        for &(_, b) in &model.support {
            assert!(b.abs() <= DEFAULT_C + 1e-12);
        }
    }

    #[test]
    fn sigmoid_kernel_trains_without_diverging() {
        let data = linear_data();
        let model = SvrModel::fit(&data, SvrKernel::Sigmoid).unwrap();
        assert!(model.iterations < MAX_ITER);
        for row in &data.x {
            assert!(model.predict_one(*row).is_finite());
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let data = linear_data();
        let a = SvrModel::fit(&data, SvrKernel::Polynomial).unwrap();
        let b = SvrModel::fit(&data, SvrKernel::Polynomial).unwrap();
        assert_eq!(a, b);
    }
}
