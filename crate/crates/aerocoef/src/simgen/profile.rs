//! Flight profiles: altitude/Mach schedules, disturbances, noise levels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quintic smoothstep: C² ramp from 0 to 1 on [0, 1].
pub(crate) fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (6.0 * x * x - 15.0 * x + 10.0)
}

pub(crate) fn smoothstep_d1(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    30.0 * x * x * (x - 1.0) * (x - 1.0)
}

pub(crate) fn smoothstep_d2(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    60.0 * x * (2.0 * x - 1.0) * (x - 1.0)
}

/// A piecewise schedule of holds and C² ramps with analytic derivatives.
#[derive(Debug, Clone)]
pub struct Schedule {
    /// Contiguous segments `(t0, t1, v0, v1)`; holds have `v0 == v1`.
    segs: Vec<(f64, f64, f64, f64)>,
}

impl Schedule {
    pub fn builder(start_value: f64) -> ScheduleBuilder {
        ScheduleBuilder { t: 0.0, v: start_value, segs: Vec::new() }
    }

    fn seg_at(&self, t: f64) -> (f64, f64, f64, f64) {
        let first = self.segs.first().copied().unwrap();
        if t <= first.0 {
            return (t - 1.0, t + 1.0, first.2, first.2);
        }
        for &s in &self.segs {
            if t <= s.1 {
                return s;
            }
        }
        let last = self.segs.last().copied().unwrap();
        (t - 1.0, t + 1.0, last.3, last.3)
    }

    pub fn value(&self, t: f64) -> f64 {
        let (t0, t1, v0, v1) = self.seg_at(t);
        v0 + (v1 - v0) * smoothstep((t - t0) / (t1 - t0))
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let (t0, t1, v0, v1) = self.seg_at(t);
        (v1 - v0) * smoothstep_d1((t - t0) / (t1 - t0)) / (t1 - t0)
    }

    pub fn second(&self, t: f64) -> f64 {
        let (t0, t1, v0, v1) = self.seg_at(t);
        (v1 - v0) * smoothstep_d2((t - t0) / (t1 - t0)) / ((t1 - t0) * (t1 - t0))
    }

    pub fn end_time(&self) -> f64 {
        self.segs.last().map(|s| s.1).unwrap_or(0.0)
    }
}

pub struct ScheduleBuilder {
    t: f64,
    v: f64,
    segs: Vec<(f64, f64, f64, f64)>,
}

impl ScheduleBuilder {
    /// Hold the current value until absolute time `t`.
    pub fn hold_until(mut self, t: f64) -> Self {
        if t > self.t {
            self.segs.push((self.t, t, self.v, self.v));
            self.t = t;
        }
        self
    }

    /// Ramp to `target` over `duration` seconds starting now.
    pub fn ramp_to(mut self, target: f64, duration: f64) -> Self {
        let d = duration.max(1e-9);
        self.segs.push((self.t, self.t + d, self.v, target));
        self.t += d;
        self.v = target;
        self
    }

    pub fn current_time(&self) -> f64 {
        self.t
    }

    pub fn build(mut self, total: f64) -> Schedule {
        if total > self.t {
            self.segs.push((self.t, total, self.v, self.v));
        }
        if self.segs.is_empty() {
            self.segs.push((0.0, total.max(1.0), self.v, self.v));
        }
        Schedule { segs: self.segs }
    }
}

/// Scripted events exercising the segmentation exclusion rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Disturbance {
    /// Permanent altitude change, C² ramp (participates in the dynamics when
    /// generated, series-only when injected post hoc).
    ClimbStep { start: f64, duration: f64, delta_altitude: f64 },
    /// Permanent heading change, C² ramp.
    HeadingTurn { start: f64, duration: f64, delta_heading: f64 },
    /// Transient wind bump, `amplitude · sin²(pi·x)` over the span.
    WindGust { start: f64, duration: f64, amplitude: f64 },
}

impl Disturbance {
    pub fn span(&self) -> (f64, f64) {
        match *self {
            Disturbance::ClimbStep { start, duration, .. }
            | Disturbance::HeadingTurn { start, duration, .. }
            | Disturbance::WindGust { start, duration, .. } => (start, start + duration),
        }
    }
}

/// Check disturbance spans: inside the flight, pairwise non-overlapping.
pub fn validate_disturbances(script: &[Disturbance], duration: f64) -> Result<()> {
    let mut spans: Vec<(f64, f64)> = script.iter().map(|d| d.span()).collect();
    for &(a, b) in &spans {
        if !(a >= 0.0 && b <= duration && b > a) {
            return Err(Error::Invalid(format!(
                "disturbance span ({a}, {b}) outside flight duration {duration}"
            )));
        }
    }
    spans.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    for w in spans.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::OverlappingDisturbances(w[1].0));
        }
    }
    Ok(())
}

/// Per-channel sensor noise standard deviations (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorNoise {
    pub altitude_m: f64,
    pub tas_ms: f64,
    pub alpha_rad: f64,
    pub gamma_rad: f64,
    pub mass_kg: f64,
    pub fuel_flow_kgps: f64,
    pub sat_k: f64,
    pub heading_rad: f64,
    pub wind_ms: f64,
}

impl SensorNoise {
    pub fn none() -> Self {
        SensorNoise {
            altitude_m: 0.0,
            tas_ms: 0.0,
            alpha_rad: 0.0,
            gamma_rad: 0.0,
            mass_kg: 0.0,
            fuel_flow_kgps: 0.0,
            sat_k: 0.0,
            heading_rad: 0.0,
            wind_ms: 0.0,
        }
    }
}

impl Default for SensorNoise {
    fn default() -> Self {
        SensorNoise {
            altitude_m: 0.5,
            tas_ms: 0.1,
            alpha_rad: 1.0e-3,
            gamma_rad: 1.0e-4,
            mass_kg: 5.0,
            fuel_flow_kgps: 1.0e-3,
            sat_k: 0.1,
            heading_rad: 1.0e-3,
            wind_ms: 0.05,
        }
    }
}

/// Smooth relative-error process applied to the true SFC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SfcErrorProcess {
    /// Target mean absolute relative error; 0 disables the process.
    pub mean_abs: f64,
    /// Correlation time of the smooth error, s.
    pub correlation_time: f64,
}

impl Default for SfcErrorProcess {
    fn default() -> Self {
        SfcErrorProcess { mean_abs: 3.68e-2, correlation_time: 60.0 }
    }
}

/// One flight's generation recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightProfile {
    /// Cruise altitude, m.
    pub cruise_altitude: f64,
    /// Cruise Mach; held constant in cruise.
    pub cruise_mach: f64,
    /// Mass at the first sample, kg.
    pub initial_mass: f64,
    /// Total duration, s.
    pub duration: f64,
    /// When present, the flight starts here and climbs to cruise.
    pub initial_altitude: Option<f64>,
    /// Climb rate, m/s.
    pub climb_rate: f64,
    /// Mach at the start of the climb.
    pub climb_mach_start: f64,
    /// Optional climb level-offs `(altitude m, hold s)`.
    pub climb_level_offs: Vec<(f64, f64)>,
    /// Deviation from ISA temperature, K.
    pub isa_offset: f64,
    /// Constant base heading, rad.
    pub heading: f64,
    pub disturbances: Vec<Disturbance>,
    pub noise: SensorNoise,
    pub sfc_error: SfcErrorProcess,
}

impl Default for FlightProfile {
    fn default() -> Self {
        FlightProfile {
            cruise_altitude: 10_668.0,
            cruise_mach: 0.78,
            initial_mass: 64_000.0,
            duration: 3_600.0,
            initial_altitude: None,
            climb_rate: 8.0,
            climb_mach_start: 0.45,
            climb_level_offs: Vec::new(),
            isa_offset: 0.0,
            heading: 1.2,
            disturbances: Vec::new(),
            noise: SensorNoise::default(),
            sfc_error: SfcErrorProcess::default(),
        }
    }
}

impl FlightProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.cruise_mach >= 0.70 && self.cruise_mach <= 0.85) {
            return Err(Error::Config(format!(
                "cruise Mach {} outside the allowed [0.70, 0.85]",
                self.cruise_mach
            )));
        }
        if self.duration < 2.0 {
            return Err(Error::Config("flight duration must be at least 2 s".into()));
        }
        if self.initial_mass <= 0.0 {
            return Err(Error::Config("initial mass must be positive".into()));
        }
        validate_disturbances(&self.disturbances, self.duration)
    }

    /// Altitude schedule: optional climb with level-offs, then cruise with
    /// climb-step disturbances folded in so the dynamics stay consistent.
    pub fn altitude_schedule(&self) -> Schedule {
        let start = self.initial_altitude.unwrap_or(self.cruise_altitude);
        let mut b = Schedule::builder(start);
        let mut level = start;
        if let Some(init) = self.initial_altitude {
            let mut from = init;
            let mut offs = self.climb_level_offs.clone();
            offs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for (alt, hold) in offs {
                if alt > from && alt < self.cruise_altitude {
                    b = b.ramp_to(alt, (alt - from) / self.climb_rate);
                    let t = b.current_time();
                    b = b.hold_until(t + hold);
                    from = alt;
                }
            }
            b = b.ramp_to(self.cruise_altitude, (self.cruise_altitude - from) / self.climb_rate);
            level = self.cruise_altitude;
        }
        let mut steps: Vec<&Disturbance> = self
            .disturbances
            .iter()
            .filter(|d| matches!(d, Disturbance::ClimbStep { .. }))
            .collect();
        steps.sort_by(|a, b| a.span().0.partial_cmp(&b.span().0).unwrap());
        for d in steps {
            if let Disturbance::ClimbStep { start, duration, delta_altitude } = *d {
                b = b.hold_until(start);
                b = b.ramp_to(level + delta_altitude, duration);
                level += delta_altitude;
            }
        }
        b.build(self.duration)
    }

    /// Mach schedule: ramps from the climb Mach to the cruise Mach across the
    /// climb, constant afterwards.
    pub fn mach_schedule(&self) -> Schedule {
        match self.initial_altitude {
            None => Schedule::builder(self.cruise_mach).build(self.duration),
            Some(init) => {
                let climb_height: f64 = self.cruise_altitude - init;
                let hold_total: f64 = self.climb_level_offs.iter().map(|&(_, h)| h).sum();
                let climb_time = climb_height.max(0.0) / self.climb_rate + hold_total;
                Schedule::builder(self.climb_mach_start)
                    .ramp_to(self.cruise_mach, climb_time.max(1.0))
                    .build(self.duration)
            }
        }
    }
}

/// Fleet-level randomization for paper-like synthetic campaigns: cruise Mach
/// concentrated so most samples land in a narrow band, a few flight levels,
/// and a spread of masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetSpec {
    pub base: FlightProfile,
    pub mach_mean: f64,
    pub mach_std: f64,
    pub mach_clip: (f64, f64),
    pub flight_levels_m: Vec<f64>,
    pub mass_range: (f64, f64),
}

impl Default for FleetSpec {
    fn default() -> Self {
        FleetSpec {
            base: FlightProfile::default(),
            mach_mean: 0.785,
            mach_std: 0.0091,
            mach_clip: (0.70, 0.85),
            flight_levels_m: vec![10_058.4, 10_668.0, 11_277.6],
            mass_range: (54_000.0, 72_000.0),
        }
    }
}

impl FleetSpec {
    pub fn sample_profile(&self, rng: &mut impl Rng) -> FlightProfile {
        use rand_distr::{Distribution, Normal};
        let normal = Normal::new(self.mach_mean, self.mach_std).unwrap();
        let mach = normal.sample(rng).clamp(self.mach_clip.0, self.mach_clip.1);
        let level = self.flight_levels_m[rng.gen_range(0..self.flight_levels_m.len())];
        let mass = rng.gen_range(self.mass_range.0..self.mass_range.1);
        FlightProfile {
            cruise_altitude: level,
            cruise_mach: mach,
            initial_mass: mass,
            ..self.base.clone()
        }
    }
}
