//! Time-indexed telemetry for one flight on a uniform 1 Hz grid.

use serde::{Deserialize, Serialize};

/// One flight's telemetry in SI units. All series share the length of `time`.
/// Samples with missing raw cells keep their grid slot and carry
/// `valid[i] == false`; such slots hold zeros and must be skipped downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FlightFrame {
    pub flight_id: String,
    /// Sample times, s; uniform grid (1 Hz for recorded data).
    pub time: Vec<f64>,
    /// Pressure altitude, m.
    pub altitude: Vec<f64>,
    /// True airspeed, m/s.
    pub tas: Vec<f64>,
    /// Mach number.
    pub mach: Vec<f64>,
    /// Angle of attack, rad.
    pub alpha: Vec<f64>,
    /// Path angle, rad.
    pub gamma: Vec<f64>,
    /// Mass, kg.
    pub mass: Vec<f64>,
    /// Fuel flow, kg/s.
    pub fuel_flow: Vec<f64>,
    /// Static air temperature, K.
    pub sat: Vec<f64>,
    /// Air density, kg/m³.
    pub rho: Vec<f64>,
    /// Heading, rad.
    pub heading: Vec<f64>,
    /// Wind speed, m/s.
    pub wind: Vec<f64>,
    /// Per-sample validity mask.
    pub valid: Vec<bool>,
}

/// A single invariant violation found in a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Sample index the violation anchors to (0 for frame-level issues).
    pub index: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    EmptyFrame,
    LengthMismatch,
    NonUniformGrid,
    NonPositiveTas,
    NonPositiveRho,
    NonPositiveMass,
    NonPositiveSat,
    MachOutOfRange,
    NonFiniteValue,
}

impl std::fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ViolationKind::EmptyFrame => "frame is empty",
            ViolationKind::LengthMismatch => "series lengths differ",
            ViolationKind::NonUniformGrid => "time grid is not uniform",
            ViolationKind::NonPositiveTas => "true airspeed is not positive",
            ViolationKind::NonPositiveRho => "air density is not positive",
            ViolationKind::NonPositiveMass => "mass is not positive",
            ViolationKind::NonPositiveSat => "static air temperature is not positive",
            ViolationKind::MachOutOfRange => "Mach number outside (0, 1)",
            ViolationKind::NonFiniteValue => "non-finite value",
        };
        write!(f, "{s}")
    }
}

impl FlightFrame {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// Time step of the grid (first difference).
    pub fn dt(&self) -> f64 {
        if self.time.len() >= 2 { self.time[1] - self.time[0] } else { 1.0 }
    }

    fn series(&self) -> [(&'static str, &Vec<f64>); 11] {
        [
            ("altitude", &self.altitude),
            ("tas", &self.tas),
            ("mach", &self.mach),
            ("alpha", &self.alpha),
            ("gamma", &self.gamma),
            ("mass", &self.mass),
            ("fuel_flow", &self.fuel_flow),
            ("sat", &self.sat),
            ("rho", &self.rho),
            ("heading", &self.heading),
            ("wind", &self.wind),
        ]
    }
}

/// Check every frame invariant and report each violation with its sample
/// index. An empty list means the frame is valid. Pure: never mutates and is
/// deterministic in its input.
pub fn validate_frame(frame: &FlightFrame) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = frame.time.len();
    if n == 0 {
        out.push(Violation { index: 0, kind: ViolationKind::EmptyFrame });
        return out;
    }
    if frame.valid.len() != n || frame.series().iter().any(|(_, s)| s.len() != n) {
        out.push(Violation { index: 0, kind: ViolationKind::LengthMismatch });
        return out;
    }
    if n >= 2 {
        let dt = frame.time[1] - frame.time[0];
        for i in 1..n {
            let step = frame.time[i] - frame.time[i - 1];
            if (step - dt).abs() > 1e-9 * dt.abs().max(1.0) {
                out.push(Violation { index: i, kind: ViolationKind::NonUniformGrid });
            }
        }
    }
    for i in 0..n {
        if !frame.valid[i] {
            continue;
        }
        if frame.series().iter().any(|(_, s)| !s[i].is_finite()) {
            out.push(Violation { index: i, kind: ViolationKind::NonFiniteValue });
            continue;
        }
        if frame.tas[i] <= 0.0 {
            out.push(Violation { index: i, kind: ViolationKind::NonPositiveTas });
        }
        if frame.rho[i] <= 0.0 {
            out.push(Violation { index: i, kind: ViolationKind::NonPositiveRho });
        }
        if frame.mass[i] <= 0.0 {
            out.push(Violation { index: i, kind: ViolationKind::NonPositiveMass });
        }
        if frame.sat[i] <= 0.0 {
            out.push(Violation { index: i, kind: ViolationKind::NonPositiveSat });
        }
        if !(frame.mach[i] > 0.0 && frame.mach[i] < 1.0) {
            out.push(Violation { index: i, kind: ViolationKind::MachOutOfRange });
        }
    }
    out
}
