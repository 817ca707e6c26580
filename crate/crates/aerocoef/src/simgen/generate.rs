//! Flight generation by quasi-static trim.
//!
//! Each 1 Hz step prescribes altitude and Mach (with analytic time
//! derivatives), solves the lift balance for the angle of attack with thrust
//! eliminated through the drag balance, and integrates the mass with the fuel
//! flow. The force balance therefore holds exactly at every step before
//! sensor noise, which is what the round-trip verification needs.

use std::io::Write;
use std::path::Path;

use rand_distr::{Distribution, Normal};

use crate::config::EngineParams;
use crate::error::{Error, Result};
use crate::frame::FlightFrame;
use crate::physics::isa::{isa_density, isa_temperature, speed_of_sound, LAPSE};
use crate::physics::sfc::specific_fuel_consumption;
use crate::rng;
use crate::simgen::polar::GroundTruthPolar;
use crate::simgen::profile::{
    smoothstep, validate_disturbances, Disturbance, FlightProfile,
};

const TAG_SFC_DELTA: u64 = 0xd3;
const TAG_NOISE: u64 = 0x5e;

/// Ground truth recorded alongside a generated flight.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthTrace {
    pub time: Vec<f64>,
    pub cd: Vec<f64>,
    pub cl: Vec<f64>,
    pub alpha: Vec<f64>,
    pub thrust: Vec<f64>,
    /// Prescribed airspeed derivative, m/s².
    pub tas_dot: Vec<f64>,
    /// Prescribed path-angle derivative, rad/s.
    pub gamma_dot: Vec<f64>,
    /// Realized SFC relative error at each step.
    pub sfc_delta: Vec<f64>,
}

impl GroundTruthTrace {
    pub const CSV_HEADER: &'static str = "time_s,cd_true,cl_true,alpha_true_rad,thrust_n";

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.time.len() * 64);
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for i in 0..self.time.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.time[i], self.cd[i], self.cl[i], self.alpha[i], self.thrust[i]
            ));
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Smooth relative-error path: an Ornstein-Uhlenbeck draw rescaled so its
/// mean absolute value hits the configured target exactly.
fn sfc_delta_path(n: usize, mean_abs: f64, tau: f64, seed: u64) -> Vec<f64> {
    if mean_abs <= 0.0 || n == 0 {
        return vec![0.0; n];
    }
    let mut rng = rng::stream(seed, &[TAG_SFC_DELTA]);
    let sigma_st = mean_abs * (std::f64::consts::PI / 2.0).sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    let decay = (-1.0 / tau).exp();
    let diffuse = sigma_st * (1.0 - decay * decay).sqrt();
    let mut path = Vec::with_capacity(n);
    let mut x = sigma_st * normal.sample(&mut rng);
    for _ in 0..n {
        path.push(x);
        x = x * decay + diffuse * normal.sample(&mut rng);
    }
    let mean = path.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
    if mean > 0.0 {
        let scale = mean_abs / mean;
        for v in &mut path {
            *v = (*v * scale).clamp(-0.5, 0.5);
        }
    }
    path
}

struct TrimResult {
    alpha: f64,
    thrust: f64,
    cd: f64,
    cl: f64,
}

/// Solve the lift balance for alpha with thrust eliminated via the drag
/// balance. The residual is strictly increasing in alpha over the polar's
/// range for sane parameters, so bisection is reliable.
fn trim(
    polar: &GroundTruthPolar,
    q: f64,
    mass: f64,
    g: f64,
    v: f64,
    v_dot: f64,
    gamma: f64,
    gamma_dot: f64,
    mach: f64,
    t: f64,
) -> Result<TrimResult> {
    let residual = |alpha: f64| -> f64 {
        let cd = polar.cd(alpha, mach);
        let thrust = (mass * v_dot + q * cd + mass * g * gamma.sin()) / alpha.cos();
        thrust * alpha.sin() + q * polar.cl(alpha, mach)
            - mass * v * gamma_dot
            - mass * g * gamma.cos()
    };
    let (mut lo, mut hi) = polar.alpha_range;
    let f_lo = residual(lo);
    let f_hi = residual(hi);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::TrimFailure {
            t,
            msg: format!("no trim angle in [{lo}, {hi}] (residuals {f_lo:.3e}, {f_hi:.3e})"),
        });
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let cd = polar.cd(alpha, mach);
    let cl = polar.cl(alpha, mach);
    let thrust = (mass * v_dot + q * cd + mass * g * gamma.sin()) / alpha.cos();
    Ok(TrimResult { alpha, thrust, cd, cl })
}

/// Generate one flight and its ground-truth trace.
pub fn generate(
    polar: &GroundTruthPolar,
    profile: &FlightProfile,
    params: &EngineParams,
    flight_id: &str,
    seed: u64,
) -> Result<(FlightFrame, GroundTruthTrace)> {
    polar.validate()?;
    profile.validate()?;
    let n = profile.duration.round() as usize;
    let alt = profile.altitude_schedule();
    let mach_sched = profile.mach_schedule();
    let delta = sfc_delta_path(
        n,
        profile.sfc_error.mean_abs,
        profile.sfc_error.correlation_time,
        seed,
    );
    let mut noise_rng = rng::stream(seed, &[TAG_NOISE]);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let nz = &profile.noise;
    let mut gauss = move |std: f64| -> f64 {
        // Every channel consumes a draw even at zero noise so the stream
        // layout does not depend on the noise configuration.
        let x = normal.sample(&mut noise_rng);
        std * x
    };

    let mut frame = FlightFrame {
        flight_id: flight_id.to_string(),
        time: Vec::with_capacity(n),
        altitude: Vec::with_capacity(n),
        tas: Vec::with_capacity(n),
        mach: Vec::with_capacity(n),
        alpha: Vec::with_capacity(n),
        gamma: Vec::with_capacity(n),
        mass: Vec::with_capacity(n),
        fuel_flow: Vec::with_capacity(n),
        sat: Vec::with_capacity(n),
        rho: Vec::with_capacity(n),
        heading: Vec::with_capacity(n),
        wind: Vec::with_capacity(n),
        valid: vec![true; n],
    };
    let mut trace = GroundTruthTrace {
        time: Vec::with_capacity(n),
        cd: Vec::with_capacity(n),
        cl: Vec::with_capacity(n),
        alpha: Vec::with_capacity(n),
        thrust: Vec::with_capacity(n),
        tas_dot: Vec::with_capacity(n),
        gamma_dot: Vec::with_capacity(n),
        sfc_delta: delta.clone(),
    };

    let g = params.gravity;
    let s = params.wing_surface;
    let mut mass = profile.initial_mass;
    for i in 0..n {
        let t = i as f64;
        let h = alt.value(t);
        let h_dot = alt.deriv(t);
        let h_ddot = alt.second(t);
        let sat = isa_temperature(h)? + profile.isa_offset;
        let dsat_dh = if h <= 11_000.0 { -LAPSE } else { 0.0 };
        let sound = speed_of_sound(sat);
        let mach = mach_sched.value(t);
        let mach_dot = mach_sched.deriv(t);
        let v = mach * sound;
        // dv/dt follows the Mach schedule and the temperature lapse.
        let sound_dot = sound / (2.0 * sat) * dsat_dh * h_dot;
        let v_dot = mach_dot * sound + mach * sound_dot;
        let u = h_dot / v;
        let gamma = u.asin();
        let u_dot = (h_ddot * v - h_dot * v_dot) / (v * v);
        let gamma_dot = u_dot / (1.0 - u * u).sqrt();
        let rho = isa_density(h, sat)?;
        let q = 0.5 * rho * v * v * s;

        let trimmed = trim(polar, q, mass, g, v, v_dot, gamma, gamma_dot, mach, t)?;
        let sfc = specific_fuel_consumption(sat, h, mach, params)?;
        if !(sfc.value > 0.0) {
            return Err(Error::NonPositiveSfc(sfc.value));
        }
        let sfc_true = sfc.value * (1.0 + delta[i]);
        let fuel_flow = sfc_true * trimmed.thrust;

        frame.time.push(t);
        frame.altitude.push(h + gauss(nz.altitude_m));
        let tas_rec = v + gauss(nz.tas_ms);
        let sat_rec = sat + gauss(nz.sat_k);
        frame.tas.push(tas_rec);
        // Recorded Mach is derived avionics: noisy TAS over noisy SAT.
        frame.mach.push(tas_rec / speed_of_sound(sat_rec.max(1.0)));
        frame.alpha.push(trimmed.alpha + gauss(nz.alpha_rad));
        frame.gamma.push(gamma + gauss(nz.gamma_rad));
        frame.mass.push(mass + gauss(nz.mass_kg));
        frame.fuel_flow.push(fuel_flow + gauss(nz.fuel_flow_kgps));
        frame.sat.push(sat_rec);
        frame.rho.push(rho);
        frame.heading.push(profile.heading + gauss(nz.heading_rad));
        frame.wind.push(gauss(nz.wind_ms));

        trace.time.push(t);
        trace.cd.push(trimmed.cd);
        trace.cl.push(trimmed.cl);
        trace.alpha.push(trimmed.alpha);
        trace.thrust.push(trimmed.thrust);
        trace.tas_dot.push(v_dot);
        trace.gamma_dot.push(gamma_dot);

        mass -= fuel_flow;
    }

    // Heading and wind events only touch their own series.
    let series_script: Vec<Disturbance> = profile
        .disturbances
        .iter()
        .filter(|d| !matches!(d, Disturbance::ClimbStep { .. }))
        .copied()
        .collect();
    apply_series_disturbances(&mut frame, &series_script);

    Ok((frame, trace))
}

fn apply_series_disturbances(frame: &mut FlightFrame, script: &[Disturbance]) {
    for d in script {
        match *d {
            Disturbance::ClimbStep { start, duration, delta_altitude } => {
                for i in 0..frame.len() {
                    let x = (frame.time[i] - start) / duration;
                    if x > 0.0 {
                        frame.altitude[i] += delta_altitude * smoothstep(x);
                    }
                }
            }
            Disturbance::HeadingTurn { start, duration, delta_heading } => {
                for i in 0..frame.len() {
                    let x = (frame.time[i] - start) / duration;
                    if x > 0.0 {
                        frame.heading[i] += delta_heading * smoothstep(x);
                    }
                }
            }
            Disturbance::WindGust { start, duration, amplitude } => {
                for i in 0..frame.len() {
                    let x = (frame.time[i] - start) / duration;
                    if (0.0..=1.0).contains(&x) {
                        let s = (std::f64::consts::PI * x).sin();
                        frame.wind[i] += amplitude * s * s;
                    }
                }
            }
        }
    }
}

/// Apply scripted disturbances to an existing frame, series-only: the result
/// exercises the segmentation rules but no longer satisfies the force
/// balance. Overlapping or out-of-frame scripts are rejected; an empty
/// script returns the frame unchanged.
pub fn inject_disturbance(frame: &FlightFrame, script: &[Disturbance]) -> Result<FlightFrame> {
    let duration = frame.time.last().copied().unwrap_or(0.0) + frame.dt();
    validate_disturbances(script, duration)?;
    let mut out = frame.clone();
    apply_series_disturbances(&mut out, script);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::profile::SensorNoise;

    use crate::simgen::profile::SfcErrorProcess;

    fn quiet_profile() -> FlightProfile {
        FlightProfile {
            noise: SensorNoise::none(),
            sfc_error: SfcErrorProcess { mean_abs: 0.0, correlation_time: 600.0 },
            duration: 900.0,
            ..FlightProfile::default()
        }
    }

    #[test]
    fn mass_strictly_decreases_while_burning() {
        let polar = GroundTruthPolar::default();
        let params = EngineParams::default();
        let (frame, _) = generate(&polar, &quiet_profile(), &params, "F0", 42).unwrap();
        for w in frame.mass.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn force_balance_residuals_vanish_before_noise() {
        let polar = GroundTruthPolar::default();
        let params = EngineParams::default();
        let (frame, trace) = generate(&polar, &quiet_profile(), &params, "F0", 7).unwrap();
        let s = params.wing_surface;
        let g = params.gravity;
        for i in 0..frame.len() {
            let q = 0.5 * frame.rho[i] * frame.tas[i] * frame.tas[i] * s;
            let d = q * trace.cd[i];
            let l = q * trace.cl[i];
            let m = frame.mass[i];
            let a = trace.alpha[i];
            let gm = frame.gamma[i];
            let scale = trace.thrust[i].abs().max(m * g);
            let res_v = trace.thrust[i] * a.cos() - d - m * g * gm.sin() - m * trace.tas_dot[i];
            let res_g =
                trace.thrust[i] * a.sin() + l - m * g * gm.cos() - m * frame.tas[i] * trace.gamma_dot[i];
            assert!(res_v.abs() / scale < 1e-9, "drag balance at {i}: {res_v:.3e}");
            assert!(res_g.abs() / scale < 1e-9, "lift balance at {i}: {res_g:.3e}");
        }
    }

    #[test]
    fn steady_cruise_lift_close_to_weight_over_q() {
        let polar = GroundTruthPolar::default();
        let params = EngineParams::default();
        let (frame, trace) = generate(&polar, &quiet_profile(), &params, "F0", 3).unwrap();
        for i in [0usize, 300, 899] {
            let q = 0.5 * frame.rho[i] * frame.tas[i] * frame.tas[i] * params.wing_surface;
            let steady = frame.mass[i] * params.gravity / q;
            // Off only by the thrust projection term sin(alpha)·T/(q)
            let correction = trace.alpha[i].sin() * trace.thrust[i] / q;
            assert!((trace.cl[i] - (steady - correction)).abs() < 1e-9);
        }
    }

    #[test]
    fn sfc_delta_mean_abs_matches_target() {
        let path = sfc_delta_path(20_000, 3.68e-2, 600.0, 5);
        let mean = path.iter().map(|v| v.abs()).sum::<f64>() / path.len() as f64;
        assert!((mean - 3.68e-2).abs() / 3.68e-2 < 0.05, "mean |delta| = {mean}");
        // Smoothness: one-step increments are small relative to the level.
        let max_step = path.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        assert!(max_step < 2.0e-2, "max step {max_step}");
    }

    #[test]
    fn generation_is_deterministic() {
        let polar = GroundTruthPolar::default();
        let params = EngineParams::default();
        let mut profile = quiet_profile();
        profile.noise = SensorNoise::default();
        profile.sfc_error = Default::default();
        let a = generate(&polar, &profile, &params, "F0", 11).unwrap();
        let b = generate(&polar, &profile, &params, "F0", 11).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let c = generate(&polar, &profile, &params, "F0", 12).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn injected_climb_step_ramps_monotonically() {
        let polar = GroundTruthPolar::default();
        let params = EngineParams::default();
        let (frame, _) = generate(&polar, &quiet_profile(), &params, "F0", 1).unwrap();
        let stepped = inject_disturbance(
            &frame,
            &[Disturbance::ClimbStep { start: 300.0, duration: 120.0, delta_altitude: 609.6 }],
        )
        .unwrap();
        let ramp = &stepped.altitude[300..=420];
        for w in ramp.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!((stepped.altitude[420] - frame.altitude[420] - 609.6).abs() < 1e-9);
        assert_eq!(stepped.altitude[100], frame.altitude[100]);
    }

    #[test]
    fn injected_heading_turn_dwarfs_the_threshold() {
        let polar = GroundTruthPolar::default();
        let params = EngineParams::default();
        let (frame, _) = generate(&polar, &quiet_profile(), &params, "F0", 2).unwrap();
        let turned = inject_disturbance(
            &frame,
            &[Disturbance::HeadingTurn { start: 400.0, duration: 60.0, delta_heading: 0.5236 }],
        )
        .unwrap();
        let slice = &turned.heading[400..=460];
        let mean = slice.iter().sum::<f64>() / slice.len() as f64;
        let std =
            (slice.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / slice.len() as f64).sqrt();
        assert!(std > 0.1, "turn std {std} must exceed 10x the 0.01 threshold");
    }

    #[test]
    fn empty_script_is_identity() {
        let polar = GroundTruthPolar::default();
        let params = EngineParams::default();
        let (frame, _) = generate(&polar, &quiet_profile(), &params, "F0", 1).unwrap();
        let same = inject_disturbance(&frame, &[]).unwrap();
        assert_eq!(frame, same);
    }
}
