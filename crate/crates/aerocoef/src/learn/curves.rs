//! Prediction curves over Mach for fixed angles of attack, with a smoothed
//! overlay for readability of the tree-based models. The overlay highlights
//! the underlying tendency; it is not a predictive device.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::estimator::TrainedEstimator;
use crate::preprocess::spline::SmoothedSeries;

/// Effective degrees of freedom of the overlay spline. The raw curve's
/// staircase texture is model structure rather than noise, so the overlay
/// smooths to a fixed gentle budget instead of cross-validating.
const OVERLAY_DF: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub alpha_rad: f64,
    pub mach: f64,
    pub y_raw: f64,
    pub y_smooth: f64,
}

pub const CSV_HEADER: &str = "alpha_rad,mach,y_raw,y_smooth";

/// Evaluate the estimator on a Mach grid for each angle of attack and add a
/// spline-smoothed overlay per curve. The grid needs at least 4 points for
/// the overlay spline.
pub fn prediction_curves(
    est: &TrainedEstimator,
    alphas: &[f64],
    mach_grid: &[f64],
) -> Result<Vec<CurvePoint>> {
    if mach_grid.is_empty() || alphas.is_empty() {
        return Err(Error::Invalid("prediction curves need a nonempty alpha list and Mach grid".into()));
    }
    if mach_grid.len() < 4 {
        return Err(Error::TooFewSamples { need: 4, got: mach_grid.len() });
    }
    if mach_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("Mach grid must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(alphas.len() * mach_grid.len());
    for &alpha in alphas {
        let raw: Vec<f64> =
            est.predict(&mach_grid.iter().map(|&m| [alpha, m]).collect::<Vec<_>>())?;
        let spline = SmoothedSeries::fit_with_df(mach_grid, &raw, OVERLAY_DF)?;
        for (i, &m) in mach_grid.iter().enumerate() {
            out.push(CurvePoint { alpha_rad: alpha, mach: m, y_raw: raw[i], y_smooth: spline.eval(m) });
        }
    }
    Ok(out)
}

pub fn write_curves_csv(points: &[CurvePoint], path: &Path) -> Result<()> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for p in points {
        text.push_str(&format!("{},{},{},{}\n", p.alpha_rad, p.mach, p.y_raw, p.y_smooth));
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
    Ok(())
}
