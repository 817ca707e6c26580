//! Test-set error metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Targets with magnitude below this are excluded from the MAPE (with the
/// exclusion counted) since the ratio is meaningless at zero.
pub const MAPE_ZERO_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mae: f64,
    /// Mean absolute percent error; `None` when every row was excluded.
    pub mape: Option<f64>,
    /// Rows excluded from the MAPE by the zero-target guard.
    pub mape_excluded: usize,
}

/// RMSE, MAE and MAPE of predictions against targets.
pub fn metrics(y: &[f64], yhat: &[f64]) -> Result<Metrics> {
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if y.len() != yhat.len() {
        return Err(Error::Invalid(format!(
            "metrics need equal lengths, got {} and {}",
            y.len(),
            yhat.len()
        )));
    }
    let n = y.len() as f64;
    let mut sq = 0.0;
    let mut abs = 0.0;
    let mut pct = 0.0;
    let mut pct_n = 0usize;
    for (&t, &p) in y.iter().zip(yhat) {
        let e = t - p;
        sq += e * e;
        abs += e.abs();
        if t.abs() >= MAPE_ZERO_GUARD {
            pct += (e / t).abs();
            pct_n += 1;
        }
    }
    Ok(Metrics {
        rmse: (sq / n).sqrt(),
        mae: abs / n,
        mape: if pct_n > 0 { Some(100.0 * pct / pct_n as f64) } else { None },
        mape_excluded: y.len() - pct_n,
    })
}
