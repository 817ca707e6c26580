//! Constant, linear and polynomial least-squares models.
//!
//! The polynomial basis uses all bivariate monomials up to a total degree.
//! Inputs are centered and scaled inside the basis (an affine change of
//! variables spans the same polynomial space but keeps the design matrix
//! well conditioned at degree 5 on cruise-scale features).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::data::{Standardizer, TrainData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyModel {
    pub degree: usize,
    pub scaler: Standardizer,
    /// Monomial exponents (i, j) for u0^i * u1^j, aligned with `coeffs`.
    pub powers: Vec<(u32, u32)>,
    pub coeffs: Vec<f64>,
}

fn monomials(degree: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for total in 0..=degree as u32 {
        for i in (0..=total).rev() {
            out.push((i, total - i));
        }
    }
    out
}

impl PolyModel {
    /// Least-squares fit of total degree `degree` (0 = constant, 1 = linear).
    pub fn fit(data: &TrainData, degree: usize) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if degree == 0 {
            let mean = data.y.iter().sum::<f64>() / data.len() as f64;
            return Ok(PolyModel {
                degree,
                scaler: Standardizer { mean: [0.0; 2], scale: [1.0; 2] },
                powers: vec![(0, 0)],
                coeffs: vec![mean],
            });
        }
        let scaler = Standardizer::fit(&data.x);
        let powers = monomials(degree);
        let cols = powers.len();
        let rows = data.len();
        let mut design = DMatrix::<f64>::zeros(rows, cols);
        for (r, &row) in data.x.iter().enumerate() {
            let u = scaler.apply(row);
            for (c, &(i, j)) in powers.iter().enumerate() {
                design[(r, c)] = u[0].powi(i as i32) * u[1].powi(j as i32);
            }
        }
        let y = DVector::from_column_slice(&data.y);
        let svd = design.clone().svd(true, true);
        let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let tol = max_sv * (rows.max(cols) as f64) * f64::EPSILON * 16.0;
        let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
        if rank < cols {
            return Err(Error::DegenerateDesign { rank, cols });
        }
        let coeffs = svd
            .solve(&y, tol)
            .map_err(|e| Error::Invalid(format!("least squares failed: {e}")))?;
        Ok(PolyModel { degree, scaler, powers, coeffs: coeffs.iter().cloned().collect() })
    }

    pub fn predict_one(&self, row: [f64; 2]) -> f64 {
        let u = self.scaler.apply(row);
        self.powers
            .iter()
            .zip(&self.coeffs)
            .map(|(&(i, j), &c)| c * u[0].powi(i as i32) * u[1].powi(j as i32))
            .sum()
    }
}
