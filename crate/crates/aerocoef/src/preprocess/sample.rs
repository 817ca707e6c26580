//! Periodic sampling of stable intervals into observations.

use crate::config::EngineParams;
use crate::dataset::{Observation, ZRecord};
use crate::error::Result;
use crate::physics::inverse::{drag_coefficient, lift_coefficient};
use crate::preprocess::segment::{SmoothedFrame, StableInterval};

/// Sample each interval at `period` seconds starting from its first instant.
/// Every observation evaluates the smoothed series (including the airspeed
/// and path-angle derivatives) and computes both coefficient targets.
pub fn sample_intervals(
    intervals: &[StableInterval],
    sf: &SmoothedFrame,
    params: &EngineParams,
    period: f64,
) -> Result<Vec<Observation>> {
    let mut out = Vec::new();
    for iv in intervals {
        let mut k = 0usize;
        loop {
            let t = iv.start + k as f64 * period;
            if t > iv.end {
                break;
            }
            let z = ZRecord {
                rho: sf.rho.eval(t),
                tas: sf.tas.eval(t),
                alpha: sf.alpha.eval(t),
                fuel_flow: sf.fuel_flow.eval(t),
                sat: sf.sat.eval(t),
                altitude: sf.altitude.eval(t),
                mach: sf.mach.eval(t),
                mass: sf.mass.eval(t),
                gamma: sf.gamma.eval(t),
            };
            let tas_dot = sf.tas.deriv(t);
            let gamma_dot = sf.gamma.deriv(t);
            let cd = drag_coefficient(&z, tas_dot, params)?;
            let cl = lift_coefficient(&z, gamma_dot, params)?;
            out.push(Observation {
                flight_id: sf.flight_id.clone(),
                interval_id: iv.interval_id,
                time: t,
                z,
                tas_dot,
                gamma_dot,
                cd,
                cl,
            });
            k += 1;
        }
    }
    Ok(out)
}
