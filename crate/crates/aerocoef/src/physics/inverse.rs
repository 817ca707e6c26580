//! Inverse flight dynamics: coefficient estimates from recorded telemetry.
//!
//! Projecting the point-mass force balance onto the body frame and replacing
//! thrust by fuel flow over the modeled SFC gives explicit formulas for the
//! drag and lift coefficients:
//!
//! ```text
//! cd = 2/(rho·V²·S) · ( cos(alpha)·FF/sfc − m·v_dot − m·g·sin(gamma) )
//! cl = 2/(rho·V²·S) · ( −sin(alpha)·FF/sfc + m·V·gamma_dot + m·g·cos(gamma) )
//! ```
//!
//! Under steady level flight (alpha ≈ 0, gamma = 0, constant speed) these
//! collapse to `cd = 2·FF/(sfc·rho·V²·S)` and `cl = 2·m·g/(rho·V²·S)`.

use crate::config::EngineParams;
use crate::dataset::ZRecord;
use crate::error::{Error, Result};
use crate::physics::sfc::specific_fuel_consumption;

fn dynamic_pressure_area(z: &ZRecord, params: &EngineParams) -> Result<f64> {
    let q = z.rho * z.tas * z.tas * params.wing_surface;
    if !(q > 0.0) {
        return Err(Error::NonPositiveDynamicPressure);
    }
    Ok(q)
}

fn check_finite(z: &ZRecord, derivs: &[f64]) -> Result<()> {
    let fields = [
        z.rho, z.tas, z.alpha, z.fuel_flow, z.sat, z.altitude, z.mach, z.mass, z.gamma,
    ];
    if fields.iter().chain(derivs).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("coefficient formula inputs"));
    }
    Ok(())
}

fn thrust_estimate(z: &ZRecord, params: &EngineParams) -> Result<f64> {
    let sfc = specific_fuel_consumption(z.sat, z.altitude, z.mach, params)?;
    if !(sfc.value > 0.0) {
        return Err(Error::NonPositiveSfc(sfc.value));
    }
    Ok(z.fuel_flow / sfc.value)
}

/// Drag coefficient estimate from telemetry plus the spline airspeed
/// derivative. Never returns NaN; invalid inputs are errors.
pub fn drag_coefficient(z: &ZRecord, tas_dot: f64, params: &EngineParams) -> Result<f64> {
    check_finite(z, &[tas_dot])?;
    let q = dynamic_pressure_area(z, params)?;
    let thrust = thrust_estimate(z, params)?;
    let g = params.gravity;
    Ok(2.0 / q * (z.alpha.cos() * thrust - z.mass * tas_dot - z.mass * g * z.gamma.sin()))
}

/// Lift coefficient estimate from telemetry plus the spline path-angle
/// derivative.
pub fn lift_coefficient(z: &ZRecord, gamma_dot: f64, params: &EngineParams) -> Result<f64> {
    check_finite(z, &[gamma_dot])?;
    let q = dynamic_pressure_area(z, params)?;
    let thrust = thrust_estimate(z, params)?;
    let g = params.gravity;
    Ok(2.0 / q
        * (-z.alpha.sin() * thrust + z.mass * z.tas * gamma_dot + z.mass * g * z.gamma.cos()))
}

/// Steady-flight shortcut: both coefficients under constant-speed level
/// flight with the angle of attack neglected.
pub fn steady_coefficients(z: &ZRecord, params: &EngineParams) -> Result<(f64, f64)> {
    check_finite(z, &[])?;
    let q = dynamic_pressure_area(z, params)?;
    let thrust = thrust_estimate(z, params)?;
    let cd = 2.0 / q * thrust;
    let cl = 2.0 * z.mass * params.gravity / q;
    Ok((cd, cl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PiecewiseLinear;
    use approx::assert_relative_eq;

    /// Params with a constant SFC so tests can pin its value exactly.
    fn const_sfc_params(sfc: f64, wing_surface: f64) -> EngineParams {
        let zero = PiecewiseLinear::constant(-500.0, 20_000.0, 0.0);
        EngineParams {
            bypass_ratio: 0.0,
            pressure_ratio: 30.0,
            a1: zero.clone(),
            a2: zero.clone(),
            b1: zero.clone(),
            // SAT == SAT0 in tests that use this, so sqrt scale is 1.
            b2: PiecewiseLinear::constant(-500.0, 20_000.0, sfc),
            c: 0.0,
            wing_surface,
            ..EngineParams::default()
        }
    }

    fn z_level() -> ZRecord {
        ZRecord {
            rho: 0.4,
            tas: 230.0,
            alpha: 0.0,
            fuel_flow: 0.65,
            sat: 288.15,
            altitude: 10_000.0,
            mach: 0.78,
            mass: 60_000.0,
            gamma: 0.0,
        }
    }

    #[test]
    fn steady_level_drag_hand_value() {
        // 2*(0.65/1.7e-5)/(0.4*230^2*120) ~= 0.03011
        let p = const_sfc_params(1.7e-5, 120.0);
        let cd = drag_coefficient(&z_level(), 0.0, &p).unwrap();
        assert_relative_eq!(cd, 0.030_11, max_relative = 2e-4);
    }

    #[test]
    fn vanishing_numerator_gives_zero_drag() {
        // Choose FF so cos(alpha)*FF/sfc = m*v_dot + m*g*sin(gamma).
        let p = const_sfc_params(1.7e-5, 120.0);
        let mut z = z_level();
        z.alpha = 0.03;
        z.gamma = 0.01;
        let tas_dot = 0.02;
        let balance = z.mass * tas_dot + z.mass * p.gravity * z.gamma.sin();
        z.fuel_flow = balance * 1.7e-5 / z.alpha.cos();
        let cd = drag_coefficient(&z, tas_dot, &p).unwrap();
        assert!(cd.abs() < 1e-12, "got {cd}");
    }

    #[test]
    fn steady_level_lift_hand_value() {
        // 2*60000*9.81/(0.4*52900*120) ~= 0.4636
        let p = const_sfc_params(1.7e-5, 120.0);
        let cl = lift_coefficient(&z_level(), 0.0, &p).unwrap();
        assert_relative_eq!(cl, 0.4636, max_relative = 2e-4);
    }

    #[test]
    fn vertical_path_with_zero_thrust_term_gives_zero_lift() {
        // gamma = pi/2 removes gravity from the lift balance; alpha = 0
        // removes the thrust projection; gamma_dot = 0 removes the rest.
        let p = const_sfc_params(1.7e-5, 120.0);
        let mut z = z_level();
        z.gamma = std::f64::consts::FRAC_PI_2;
        let cl = lift_coefficient(&z, 0.0, &p).unwrap();
        assert!(cl.abs() < 1e-12, "got {cl}");
    }

    #[test]
    fn full_formulas_reduce_to_steady_under_steady_conditions() {
        let p = const_sfc_params(1.7e-5, 120.0);
        let z = z_level();
        let (cd_s, cl_s) = steady_coefficients(&z, &p).unwrap();
        let cd = drag_coefficient(&z, 0.0, &p).unwrap();
        let cl = lift_coefficient(&z, 0.0, &p).unwrap();
        assert_relative_eq!(cd, cd_s, max_relative = 1e-14);
        assert_relative_eq!(cl, cl_s, max_relative = 1e-14);
    }

    #[test]
    fn steady_lift_doubles_with_mass() {
        let p = const_sfc_params(1.7e-5, 120.0);
        let z = z_level();
        let mut z2 = z;
        z2.mass *= 2.0;
        let (_, cl1) = steady_coefficients(&z, &p).unwrap();
        let (_, cl2) = steady_coefficients(&z2, &p).unwrap();
        assert_relative_eq!(cl2, 2.0 * cl1, max_relative = 1e-14);
    }

    #[test]
    fn non_finite_inputs_are_errors_not_nans() {
        let p = const_sfc_params(1.7e-5, 120.0);
        let mut z = z_level();
        z.fuel_flow = f64::NAN;
        assert!(drag_coefficient(&z, 0.0, &p).is_err());
        let mut z = z_level();
        z.rho = 0.0;
        assert!(lift_coefficient(&z, 0.0, &p).is_err());
    }

    #[test]
    fn nonpositive_sfc_is_an_error() {
        let p = const_sfc_params(-1.0e-5, 120.0);
        assert!(drag_coefficient(&z_level(), 0.0, &p).is_err());
    }
}
