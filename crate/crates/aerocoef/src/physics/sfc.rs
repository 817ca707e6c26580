//! Parametric specific-fuel-consumption model.
//!
//! The SFC (fuel mass flow per newton of thrust) is modeled as a Mach-linear
//! term with altitude-dependent coefficients, scaled by the square root of
//! the temperature ratio, plus a pressure-ratio correction:
//!
//! ```text
//! sfc = ((a1(h)·λ + a2(h))·M + (b1(h)·λ + b2(h))) · sqrt(SAT/SAT0)
//!       + (7.4e-13·(εc − 30)·h + c) · (εc − 30)
//! ```
//!
//! with λ the bypass ratio and εc the engine pressure ratio, both fixed per
//! engine type. All values in kg/(N·s).

use serde::{Deserialize, Serialize};

use crate::config::EngineParams;
use crate::error::{Error, Result};

/// Altitude coefficient of the pressure-ratio correction term.
const PRESSURE_ALT_COEFF: f64 = 7.4e-13;

/// An SFC evaluation with its inputs echoed for traceability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SfcValue {
    /// kg/(N·s)
    pub value: f64,
    pub sat: f64,
    pub altitude: f64,
    pub mach: f64,
}

/// Evaluate the SFC model at the given temperature, altitude and Mach.
pub fn specific_fuel_consumption(
    sat: f64,
    altitude: f64,
    mach: f64,
    params: &EngineParams,
) -> Result<SfcValue> {
    if !(sat > 0.0) {
        return Err(Error::Invalid(format!("static air temperature must be positive, got {sat}")));
    }
    if !sat.is_finite() || !altitude.is_finite() || !mach.is_finite() {
        return Err(Error::NonFinite("sfc inputs"));
    }
    let lambda = params.bypass_ratio;
    let eps = params.pressure_ratio;
    let mach_slope = params.a1.eval(altitude)? * lambda + params.a2.eval(altitude)?;
    let mach_intercept = params.b1.eval(altitude)? * lambda + params.b2.eval(altitude)?;
    let temperature_scale = (sat / params.sat0).sqrt();
    let pressure_term = (PRESSURE_ALT_COEFF * (eps - 30.0) * altitude + params.c) * (eps - 30.0);
    let value = (mach_slope * mach + mach_intercept) * temperature_scale + pressure_term;
    Ok(SfcValue { value, sat, altitude, mach })
}
