//! Ground-truth aerodynamic model of the simulated aircraft.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lift model affine in angle of attack with a mild Mach dependence, plus a
/// quadratic drag polar with a compressibility ramp above the drag-divergence
/// Mach:
///
/// ```text
/// cl(alpha, M) = cl_alpha · (alpha − alpha_zero_lift) · (1 + mach_gain·(M − mach_ref))
/// cd(alpha, M) = cd0 + induced_k · cl² + compress_gain · max(0, M − mach_divergence)³
/// ```
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroundTruthPolar {
    /// Lift slope, per rad.
    pub cl_alpha: f64,
    /// Zero-lift angle of attack, rad.
    pub alpha_zero_lift: f64,
    /// Relative lift change per unit Mach around the reference.
    pub mach_gain: f64,
    pub mach_ref: f64,
    /// Zero-lift drag coefficient.
    pub cd0: f64,
    /// Induced drag factor.
    pub induced_k: f64,
    /// Drag-divergence Mach; the cubic ramp starts here.
    pub mach_divergence: f64,
    pub compress_gain: f64,
    /// Valid angle-of-attack range, rad.
    pub alpha_range: (f64, f64),
    /// Valid Mach range.
    pub mach_range: (f64, f64),
}

impl Default for GroundTruthPolar {
    fn default() -> Self {
        GroundTruthPolar {
            cl_alpha: 5.5,
            alpha_zero_lift: -3.0_f64.to_radians(),
            mach_gain: 0.3,
            mach_ref: 0.78,
            cd0: 0.0185,
            induced_k: 0.045,
            // Transonic drag rise starts inside the cruise band, as it does
            // for airliners cruising near their maximum-operating Mach.
            mach_divergence: 0.76,
            compress_gain: 20.0,
            alpha_range: (-0.06, 0.15),
            mach_range: (0.30, 0.90),
        }
    }
}

impl GroundTruthPolar {
    pub fn validate(&self) -> Result<()> {
        if self.cl_alpha <= 0.0 {
            return Err(Error::Config("lift slope must be positive".into()));
        }
        // Lift strictly increasing in alpha over the whole Mach range.
        for m in [self.mach_range.0, self.mach_range.1] {
            if 1.0 + self.mach_gain * (m - self.mach_ref) <= 0.0 {
                return Err(Error::Config(format!(
                    "mach_gain makes the lift slope non-positive at M = {m}"
                )));
            }
        }
        if self.cd0 <= 0.0 {
            return Err(Error::Config("cd0 must be positive".into()));
        }
        Ok(())
    }

    fn check_range(&self, alpha: f64, mach: f64) -> Result<()> {
        if !(self.alpha_range.0..=self.alpha_range.1).contains(&alpha) {
            return Err(Error::Invalid(format!(
                "angle of attack {alpha} outside simulated range {:?}",
                self.alpha_range
            )));
        }
        if !(self.mach_range.0..=self.mach_range.1).contains(&mach) {
            return Err(Error::Invalid(format!(
                "Mach {mach} outside simulated range {:?}",
                self.mach_range
            )));
        }
        Ok(())
    }

    pub fn cl(&self, alpha: f64, mach: f64) -> f64 {
        self.cl_alpha * (alpha - self.alpha_zero_lift) * (1.0 + self.mach_gain * (mach - self.mach_ref))
    }

    pub fn cd(&self, alpha: f64, mach: f64) -> f64 {
        let cl = self.cl(alpha, mach);
        let compress = if mach > self.mach_divergence {
            self.compress_gain * (mach - self.mach_divergence).powi(3)
        } else {
            0.0
        };
        self.cd0 + self.induced_k * cl * cl + compress
    }

    /// Exact polar evaluation with range checking; the oracle for the
    /// acceptance tests.
    pub fn oracle_eval(&self, alpha: f64, mach: f64) -> Result<(f64, f64)> {
        self.check_range(alpha, mach)?;
        Ok((self.cd(alpha, mach), self.cl(alpha, mach)))
    }

    /// Invert the lift model for the trim angle of attack at a required cl.
    pub fn alpha_for_cl(&self, cl: f64, mach: f64) -> f64 {
        let slope = self.cl_alpha * (1.0 + self.mach_gain * (mach - self.mach_ref));
        self.alpha_zero_lift + cl / slope
    }
}
