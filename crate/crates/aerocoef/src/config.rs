//! Run configuration: engine/airframe constants and pipeline settings.
//!
//! Everything lives in a single JSON document so a run is reproducible from
//! one file plus a seed. [`AppConfig::default`] carries the built-in defaults;
//! the shipped engine parameter set is a synthetic placeholder with realistic
//! magnitudes for a narrow-body airliner, not manufacturer data — swap in a
//! calibrated set via `--config` for real use.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sea-level standard temperature, K.
pub const SAT0_K: f64 = 288.15;

/// A continuous piecewise-linear function of altitude.
///
/// `value(h) = slopes[i] * h + intercepts[i]` for
/// `h in [breakpoints[i], breakpoints[i+1]]`. The segments must cover the
/// whole operating range with no gaps; evaluation outside the domain is an
/// error rather than an extrapolation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PiecewiseLinear {
    pub breakpoints: Vec<f64>,
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
}

impl PiecewiseLinear {
    /// A single segment covering `[lo, hi]`.
    pub fn single(lo: f64, hi: f64, slope: f64, intercept: f64) -> Self {
        Self { breakpoints: vec![lo, hi], slopes: vec![slope], intercepts: vec![intercept] }
    }

    /// Altitude-independent constant over `[lo, hi]`.
    pub fn constant(lo: f64, hi: f64, value: f64) -> Self {
        Self::single(lo, hi, 0.0, value)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.breakpoints.len();
        if n < 2 || self.slopes.len() != n - 1 || self.intercepts.len() != n - 1 {
            return Err(Error::Config(format!(
                "piecewise function needs k+1 breakpoints for k segments, got {} breakpoints, {} slopes, {} intercepts",
                n,
                self.slopes.len(),
                self.intercepts.len()
            )));
        }
        if self.breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("piecewise breakpoints must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn eval(&self, h: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(h >= lo && h <= hi) {
            return Err(Error::PiecewiseDomain(h));
        }
        // Last segment owns its right endpoint.
        let i = match self.breakpoints.iter().position(|&b| h < b) {
            Some(p) => p - 1,
            None => self.slopes.len() - 1,
        };
        Ok(self.slopes[i] * h + self.intercepts[i])
    }
}

/// Fixed engine and airframe constants of the specific-fuel-consumption model
/// and the force balance.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EngineParams {
    /// Turbofan bypass ratio, dimensionless.
    pub bypass_ratio: f64,
    /// Overall engine pressure ratio, dimensionless.
    pub pressure_ratio: f64,
    /// Mach-slope terms of the SFC model, functions of altitude.
    pub a1: PiecewiseLinear,
    pub a2: PiecewiseLinear,
    /// Mach-intercept terms of the SFC model, functions of altitude.
    pub b1: PiecewiseLinear,
    pub b2: PiecewiseLinear,
    /// Constant of the pressure-ratio correction term, kg/(N·s).
    pub c: f64,
    /// Sea-level reference temperature, K.
    pub sat0: f64,
    /// Wing reference surface, m².
    pub wing_surface: f64,
    /// Gravitational acceleration used in the force balance, m/s².
    pub gravity: f64,
}

impl EngineParams {
    pub fn validate(&self) -> Result<()> {
        if self.sat0 <= 0.0 {
            return Err(Error::Config("sat0 must be positive".into()));
        }
        if self.wing_surface <= 0.0 {
            return Err(Error::Config("wing_surface must be positive".into()));
        }
        if self.gravity <= 0.0 {
            return Err(Error::Config("gravity must be positive".into()));
        }
        for (name, f) in
            [("a1", &self.a1), ("a2", &self.a2), ("b1", &self.b1), ("b2", &self.b2)]
        {
            f.validate().map_err(|e| Error::Config(format!("{name}: {e}")))?;
        }
        Ok(())
    }
}

impl Default for EngineParams {
    /// Placeholder parameter set, sized so the SFC comes out near
    /// 1.7e-5 kg/(N·s) in cruise. Values are NOT a published calibration.
    /// The SFC convention assumed throughout is kg of fuel per newton of
    /// thrust per second.
    fn default() -> Self {
        let lo = -500.0;
        let mid = 11_000.0;
        let hi = 20_000.0;
        // Each term is mildly altitude-dependent in the troposphere and
        // frozen above; segments meet at the breakpoint so SFC is continuous.
        let two_seg = |slope: f64, intercept: f64| PiecewiseLinear {
            breakpoints: vec![lo, mid, hi],
            slopes: vec![slope, 0.0],
            intercepts: vec![intercept, intercept + slope * mid],
        };
        EngineParams {
            bypass_ratio: 5.1,
            pressure_ratio: 32.0,
            a1: two_seg(6.0e-12, 1.10e-6),
            a2: two_seg(2.0e-11, 4.30e-6),
            b1: two_seg(-4.0e-12, 7.20e-7),
            b2: two_seg(-1.0e-11, 5.50e-6),
            c: 8.0e-7,
            sat0: SAT0_K,
            wing_surface: 122.6,
            gravity: 9.81,
        }
    }
}

/// Which flight phase the pipeline selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    #[default]
    Cruise,
    Climb,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::Cruise => write!(f, "cruise"),
            Phase::Climb => write!(f, "climb"),
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cruise" => Ok(Phase::Cruise),
            "climb" => Ok(Phase::Climb),
            other => Err(Error::Config(format!("unknown phase `{other}`"))),
        }
    }
}

/// How the smoothing-spline penalty is chosen per series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SplinePolicy {
    /// Generalized cross-validation over a log-spaced penalty grid.
    #[default]
    Gcv,
    /// Fixed penalty for every series.
    Fixed(f64),
    /// Natural cubic interpolation (zero penalty).
    Interpolate,
}

/// Thresholds and knobs of the preprocessing stage.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PipelineConfig {
    /// Altitude standard deviation threshold for a stable cruise window, m.
    pub altitude_std_max: f64,
    /// Heading standard deviation threshold, rad.
    pub heading_std_max: f64,
    /// |mean| of the wind-speed time derivative threshold, m/s².
    pub wind_deriv_mean_max: f64,
    /// Standard deviation of the wind-speed time derivative threshold, m/s².
    pub wind_deriv_std_max: f64,
    /// Minimum stable interval length, s (strict: an interval of exactly this
    /// length is rejected).
    pub min_interval_s: f64,
    /// Sliding diagnostic window length, s.
    pub window_s: f64,
    /// Sliding window step, s.
    pub window_step_s: f64,
    /// Fraction of the peak altitude above which a level counts as cruise.
    pub cruise_floor_frac: f64,
    /// Climb window floor, m (3000 ft).
    pub climb_floor_m: f64,
    /// Sampling period inside stable intervals, s.
    pub sample_period_s: f64,
    /// Spline penalty policy.
    pub spline_policy: SplinePolicy,
    /// Optional cap on the knot-residual RMS of a smoothed series, as a
    /// fraction of the raw series standard deviation.
    pub spline_residual_cap: Option<f64>,
    /// Train/validation/test fractions; must sum to 1.
    pub split_fractions: [f64; 3],
    /// Split per flight instead of per observation (leakage-aware variant).
    pub split_by_flight: bool,
    /// Default RNG seed when the CLI does not pass one.
    pub seed: u64,
    /// Flight phase the dataset targets.
    pub phase: Phase,
    /// Mean absolute relative error of the SFC model in cruise.
    pub sfc_rel_error_cruise: Option<f64>,
    /// Same for climb; no published estimate exists, so bounds are disabled.
    pub sfc_rel_error_climb: Option<f64>,
    /// Optional published-number overrides for the bound report.
    pub bound_overrides: Option<BoundOverrides>,
}

/// Externally supplied bound ingredients; when present, the bound report uses
/// them instead of quantities computed from the dataset.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct BoundOverrides {
    pub r_cd: Option<f64>,
    pub r_cl: Option<f64>,
    pub mean_phi_cd: Option<f64>,
    pub mean_phi_cl: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            altitude_std_max: 5.0,
            heading_std_max: 0.01,
            wind_deriv_mean_max: 0.05,
            wind_deriv_std_max: 0.1,
            min_interval_s: 10.0,
            window_s: 60.0,
            window_step_s: 10.0,
            cruise_floor_frac: 0.9,
            climb_floor_m: 914.4,
            sample_period_s: 10.0,
            spline_policy: SplinePolicy::Gcv,
            spline_residual_cap: Some(0.9),
            split_fractions: [0.70, 0.20, 0.10],
            split_by_flight: false,
            seed: 0,
            phase: Phase::Cruise,
            sfc_rel_error_cruise: Some(3.68e-2),
            sfc_rel_error_climb: None,
            bound_overrides: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let thresholds = [
            ("altitude_std_max", self.altitude_std_max),
            ("heading_std_max", self.heading_std_max),
            ("wind_deriv_mean_max", self.wind_deriv_mean_max),
            ("wind_deriv_std_max", self.wind_deriv_std_max),
            ("min_interval_s", self.min_interval_s),
            ("window_s", self.window_s),
            ("window_step_s", self.window_step_s),
            ("sample_period_s", self.sample_period_s),
        ];
        for (name, v) in thresholds {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be strictly positive, got {v}")));
            }
        }
        let sum: f64 = self.split_fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || self.split_fractions.iter().any(|&f| f <= 0.0) {
            return Err(Error::Config(format!(
                "split fractions must be positive and sum to 1, got {:?}",
                self.split_fractions
            )));
        }
        Ok(())
    }

    /// SFC relative error level for the configured phase, if available.
    pub fn sfc_rel_error(&self) -> Option<f64> {
        match self.phase {
            Phase::Cruise => self.sfc_rel_error_cruise,
            Phase::Climb => self.sfc_rel_error_climb,
        }
    }
}

/// The full configuration document.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct AppConfig {
    pub pipeline: PipelineConfig,
    pub engine: EngineParams,
}

impl AppConfig {
    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        self.engine.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: AppConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_eval_and_domain() {
        let f = PiecewiseLinear {
            breakpoints: vec![0.0, 10.0, 20.0],
            slopes: vec![1.0, 0.0],
            intercepts: vec![0.0, 10.0],
        };
        f.validate().unwrap();
        assert_eq!(f.eval(5.0).unwrap(), 5.0);
        assert_eq!(f.eval(10.0).unwrap(), 10.0);
        assert_eq!(f.eval(15.0).unwrap(), 10.0);
        assert_eq!(f.eval(20.0).unwrap(), 10.0);
        assert!(f.eval(-0.1).is_err());
        assert!(f.eval(20.1).is_err());
    }

    #[test]
    fn default_config_is_valid_and_round_trips() {
        let cfg = AppConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_json();
        let back = AppConfig::from_json(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn bad_fractions_rejected() {
        let mut cfg = PipelineConfig::default();
        cfg.split_fractions = [0.5, 0.2, 0.2];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn phase_parse() {
        assert_eq!("cruise".parse::<Phase>().unwrap(), Phase::Cruise);
        assert_eq!("climb".parse::<Phase>().unwrap(), Phase::Climb);
        assert!("descent".parse::<Phase>().is_err());
    }
}
