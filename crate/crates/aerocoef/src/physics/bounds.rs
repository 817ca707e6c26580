//! Total-error bound arithmetic.
//!
//! The gap between a latent coefficient and a fitted model's prediction
//! splits into the physical approximation error of the inverse-dynamics
//! formula and the statistical learning error. The mean absolute physical
//! error is bounded by `K · r_rel`, where `r_rel` is the mean absolute
//! relative error of the SFC model and `K` is the supremum of the formula's
//! sensitivity to that error. Adding the learning MAE bounds the mean
//! absolute total error; dividing by the mean coefficient (shifted by the
//! physical bound) turns it into a relative figure.

use serde::{Deserialize, Serialize};

use crate::config::EngineParams;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::physics::sfc::specific_fuel_consumption;

/// Everything the bound report needs besides the per-family learning errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Mean absolute relative error of the SFC model.
    pub sfc_rel_error: f64,
    /// Sensitivity constant for the drag formula.
    pub k_cd: f64,
    /// Sensitivity constant for the lift formula.
    pub k_cl: f64,
    /// Physical error bound for drag: `k_cd · sfc_rel_error`.
    pub r_cd: f64,
    /// Physical error bound for lift: `k_cl · sfc_rel_error`.
    pub r_cl: f64,
    /// Empirical mean of the drag coefficient estimate over the data.
    pub mean_cd: f64,
    /// Empirical mean of the lift coefficient estimate over the data.
    pub mean_cl: f64,
}

impl BoundInputs {
    /// Assemble the bound ingredients from a dataset: sensitivity constants
    /// as empirical maxima, physical bounds as their product with the SFC
    /// error level, and coefficient means over the same data.
    pub fn from_dataset(
        dataset: &Dataset,
        params: &EngineParams,
        sfc_rel_error: f64,
    ) -> Result<Self> {
        let (k_cd, k_cl) = sensitivity_constants(dataset, params)?;
        let n = dataset.len() as f64;
        let mean_cd = dataset.observations.iter().map(|o| o.cd).sum::<f64>() / n;
        let mean_cl = dataset.observations.iter().map(|o| o.cl).sum::<f64>() / n;
        Ok(BoundInputs {
            sfc_rel_error,
            k_cd,
            k_cl,
            r_cd: physical_error_bound(k_cd, sfc_rel_error),
            r_cl: physical_error_bound(k_cl, sfc_rel_error),
            mean_cd,
            mean_cl,
        })
    }
}

/// Empirical sensitivity constants: the largest magnitude, over the dataset,
/// of the coefficient formulas' SFC-error factors. The theoretical value is a
/// supremum over the whole cruise domain; with no domain box available it is
/// estimated as the maximum over the observed data.
pub fn sensitivity_constants(dataset: &Dataset, params: &EngineParams) -> Result<(f64, f64)> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let s = params.wing_surface;
    let mut k_cd: f64 = 0.0;
    let mut k_cl: f64 = 0.0;
    for o in &dataset.observations {
        let z = &o.z;
        let sfc = specific_fuel_consumption(z.sat, z.altitude, z.mach, params)?;
        if !(sfc.value > 0.0) {
            return Err(Error::NonPositiveSfc(sfc.value));
        }
        let common = 2.0 / (z.rho * z.tas * z.tas * s) * z.fuel_flow / sfc.value;
        k_cd = k_cd.max((common * z.alpha.cos()).abs());
        k_cl = k_cl.max((common * z.alpha.sin()).abs());
    }
    Ok((k_cd, k_cl))
}

/// Physical error bound: `r = K · r_rel`.
pub fn physical_error_bound(k: f64, sfc_rel_error: f64) -> f64 {
    k * sfc_rel_error
}

/// Mean absolute total-error bound: physical bound plus learning MAE.
pub fn total_error_bound_abs(r: f64, learning_mae: f64) -> f64 {
    r + learning_mae
}

/// Mean relative total-error bound as a percentage:
/// `100 · (r + MAE) / (mean − r)`. Requires the empirical mean of the
/// coefficient estimate to exceed the physical bound; otherwise the ratio is
/// undefined and an explicit error is returned.
pub fn total_error_bound_rel(r: f64, learning_mae: f64, mean_phi: f64) -> Result<f64> {
    if !(mean_phi > r) {
        return Err(Error::RelativeBoundUndefined { mean: mean_phi, r });
    }
    Ok(100.0 * (r + learning_mae) / (mean_phi - r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Observation, TargetKind, ZRecord};
    use approx::assert_relative_eq;

    #[test]
    fn physical_bound_products_match_published_rounding() {
        // 4.38e-2 * 3.68e-2 = 1.61184e-3, rounds to 1.612e-3 and 1.61e-3
        let r_cd = physical_error_bound(4.38e-2, 3.68e-2);
        assert_relative_eq!(r_cd, 1.612e-3, max_relative = 2e-4);
        assert_relative_eq!(r_cd, 1.61e-3, max_relative = 2e-3);
        // 2.94e-3 * 3.68e-2 = 1.08192e-4, rounds to 1.082e-4 and 1.08e-4
        let r_cl = physical_error_bound(2.94e-3, 3.68e-2);
        assert_relative_eq!(r_cl, 1.082e-4, max_relative = 2e-4);
        assert_relative_eq!(r_cl, 1.08e-4, max_relative = 2e-3);
        assert_eq!(physical_error_bound(0.0, 3.68e-2), 0.0);
    }

    #[test]
    fn absolute_bound_published_rows() {
        assert_relative_eq!(
            total_error_bound_abs(1.61e-3, 1.361e-3),
            2.971e-3,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            total_error_bound_abs(1.08e-4, 9.203e-3),
            9.311e-3,
            max_relative = 1e-12
        );
        assert_eq!(total_error_bound_abs(0.0, 0.0), 0.0);
    }

    #[test]
    fn relative_bound_published_rows() {
        let v = total_error_bound_rel(1.61e-3, 1.361e-3, 3.23e-2).unwrap();
        assert!((v - 9.68).abs() < 0.005, "got {v}");
        let v = total_error_bound_rel(1.61e-3, 5.932e-3, 3.23e-2).unwrap();
        assert!((v - 24.57).abs() < 0.005, "got {v}");
        let v = total_error_bound_rel(1.08e-4, 9.203e-3, 5.32e-1).unwrap();
        assert!((v - 1.75).abs() < 0.005, "got {v}");
    }

    #[test]
    fn relative_bound_explicit_error_when_mean_too_small() {
        let err = total_error_bound_rel(1.0e-2, 1.0e-3, 5.0e-3);
        assert!(err.is_err());
        // Equality also violates the strict hypothesis.
        assert!(total_error_bound_rel(1.0e-2, 1.0e-3, 1.0e-2).is_err());
    }

    #[test]
    fn bounds_monotone_in_both_arguments() {
        let base_abs = total_error_bound_abs(1.0e-3, 2.0e-3);
        assert!(total_error_bound_abs(1.1e-3, 2.0e-3) >= base_abs);
        assert!(total_error_bound_abs(1.0e-3, 2.1e-3) >= base_abs);
        let base_rel = total_error_bound_rel(1.0e-3, 2.0e-3, 3.0e-2).unwrap();
        assert!(total_error_bound_rel(1.1e-3, 2.0e-3, 3.0e-2).unwrap() >= base_rel);
        assert!(total_error_bound_rel(1.0e-3, 2.1e-3, 3.0e-2).unwrap() >= base_rel);
    }

    fn obs_with(alpha: f64) -> Observation {
        Observation {
            flight_id: "K".into(),
            interval_id: 0,
            time: 0.0,
            z: ZRecord {
                rho: 0.38,
                tas: 231.0,
                alpha,
                fuel_flow: 0.64,
                sat: 219.0,
                altitude: 10_668.0,
                mach: 0.78,
                mass: 62_000.0,
                gamma: 0.0,
            },
            tas_dot: 0.0,
            gamma_dot: 0.0,
            cd: 0.031,
            cl: 0.52,
        }
    }

    #[test]
    fn single_observation_constant_is_its_integrand() {
        let params = EngineParams::default();
        let ds = Dataset::new(vec![obs_with(0.04)], TargetKind::Drag);
        let (k_cd, k_cl) = sensitivity_constants(&ds, &params).unwrap();
        let z = &ds.observations[0].z;
        let sfc = specific_fuel_consumption(z.sat, z.altitude, z.mach, &params).unwrap();
        let common =
            2.0 / (z.rho * z.tas * z.tas * params.wing_surface) * z.fuel_flow / sfc.value;
        assert_relative_eq!(k_cd, (common * z.alpha.cos()).abs(), max_relative = 1e-14);
        assert_relative_eq!(k_cl, (common * z.alpha.sin()).abs(), max_relative = 1e-14);
    }

    #[test]
    fn zero_alpha_everywhere_kills_the_lift_constant() {
        let params = EngineParams::default();
        let ds = Dataset::new(vec![obs_with(0.0), obs_with(0.0)], TargetKind::Lift);
        let (_, k_cl) = sensitivity_constants(&ds, &params).unwrap();
        assert_eq!(k_cl, 0.0);
    }

    #[test]
    fn cruise_scale_constants_have_published_magnitudes() {
        // Realistic cruise record -> K_cd of order 1e-2, K_cl of order 1e-3.
        let params = EngineParams::default();
        let ds = Dataset::new(vec![obs_with(0.045)], TargetKind::Drag);
        let (k_cd, k_cl) = sensitivity_constants(&ds, &params).unwrap();
        assert!(k_cd > 5e-3 && k_cd < 2e-1, "k_cd = {k_cd}");
        assert!(k_cl > 2e-4 && k_cl < 2e-2, "k_cl = {k_cl}");
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let params = EngineParams::default();
        let ds = Dataset::new(vec![], TargetKind::Drag);
        assert!(sensitivity_constants(&ds, &params).is_err());
    }
}
