//! International Standard Atmosphere relations for the airliner envelope:
//! troposphere plus lower stratosphere (-500 m to 20 000 m). Outside that
//! range evaluation is an error, not an extrapolation.

use crate::error::{Error, Result};

/// Specific gas constant of dry air, J/(kg·K).
pub const R_AIR: f64 = 287.05;
/// Ratio of specific heats of air.
pub const GAMMA_AIR: f64 = 1.4;
/// Sea-level standard pressure, Pa.
pub const P0: f64 = 101_325.0;
/// Sea-level standard temperature, K.
pub const T0: f64 = 288.15;
/// Tropospheric lapse rate, K/m.
pub const LAPSE: f64 = 0.0065;
/// Standard gravity of the ISA definition, m/s².
const G0: f64 = 9.80665;
/// Tropopause altitude, m.
const H_TROPO: f64 = 11_000.0;
/// Stratospheric temperature, K.
const T_STRATO: f64 = 216.65;
/// Ceiling of the supported model range, m.
const H_MAX: f64 = 20_000.0;
/// Floor of the supported model range, m.
const H_MIN: f64 = -500.0;

/// ISA temperature at altitude, K.
pub fn isa_temperature(h: f64) -> Result<f64> {
    check_range(h)?;
    Ok(if h <= H_TROPO { T0 - LAPSE * h } else { T_STRATO })
}

/// ISA static pressure at altitude, Pa.
pub fn isa_pressure(h: f64) -> Result<f64> {
    check_range(h)?;
    let exponent = G0 / (R_AIR * LAPSE);
    if h <= H_TROPO {
        Ok(P0 * (1.0 - LAPSE * h / T0).powf(exponent))
    } else {
        let p_tropo = P0 * (T_STRATO / T0).powf(exponent);
        Ok(p_tropo * (-G0 * (h - H_TROPO) / (R_AIR * T_STRATO)).exp())
    }
}

/// Air density from ISA pressure and the recorded static air temperature,
/// kg/m³. The measured temperature replaces the standard one so warm or cold
/// days come out right while pressure altitude keeps its ISA meaning.
pub fn isa_density(h: f64, sat: f64) -> Result<f64> {
    if !(sat > 0.0) {
        return Err(Error::Invalid(format!("static air temperature must be positive, got {sat}")));
    }
    Ok(isa_pressure(h)? / (R_AIR * sat))
}

/// Local speed of sound, m/s.
pub fn speed_of_sound(sat: f64) -> f64 {
    (GAMMA_AIR * R_AIR * sat).sqrt()
}

/// Mach number from true airspeed and static air temperature.
pub fn mach_from_tas(tas: f64, sat: f64) -> Result<f64> {
    if !(sat > 0.0) {
        return Err(Error::Invalid(format!("static air temperature must be positive, got {sat}")));
    }
    if tas < 0.0 {
        return Err(Error::Invalid(format!("true airspeed must be nonnegative, got {tas}")));
    }
    Ok(tas / speed_of_sound(sat))
}

fn check_range(h: f64) -> Result<()> {
    if !(H_MIN..=H_MAX).contains(&h) {
        return Err(Error::AltitudeOutOfRange(h));
    }
    Ok(())
}
