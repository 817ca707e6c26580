//! Sampled observations and the modeling dataset.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The telemetry vector the coefficient formulas consume, at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZRecord {
    /// Air density, kg/m³.
    pub rho: f64,
    /// True airspeed, m/s.
    pub tas: f64,
    /// Angle of attack, rad.
    pub alpha: f64,
    /// Fuel flow, kg/s.
    pub fuel_flow: f64,
    /// Static air temperature, K.
    pub sat: f64,
    /// Altitude, m.
    pub altitude: f64,
    /// Mach number.
    pub mach: f64,
    /// Mass, kg.
    pub mass: f64,
    /// Path angle, rad.
    pub gamma: f64,
}

/// One sampled instant: model input, full telemetry vector, spline
/// derivatives, computed coefficient targets and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub flight_id: String,
    pub interval_id: usize,
    /// Sample time within the flight, s.
    pub time: f64,
    pub z: ZRecord,
    /// Airspeed time derivative from the smoothing spline, m/s².
    pub tas_dot: f64,
    /// Path-angle time derivative from the smoothing spline, rad/s.
    pub gamma_dot: f64,
    /// Drag coefficient target.
    pub cd: f64,
    /// Lift coefficient target.
    pub cl: f64,
}

impl Observation {
    /// Model input (angle of attack, Mach number).
    pub fn x(&self) -> [f64; 2] {
        [self.z.alpha, self.z.mach]
    }

    pub fn target(&self, kind: TargetKind) -> f64 {
        match kind {
            TargetKind::Drag => self.cd,
            TargetKind::Lift => self.cl,
        }
    }
}

/// Which coefficient a model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Drag,
    Lift,
}

impl std::fmt::Display for TargetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetKind::Drag => write!(f, "drag"),
            TargetKind::Lift => write!(f, "lift"),
        }
    }
}

/// The modeling dataset: sampled observations plus the target selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub observations: Vec<Observation>,
    pub target: TargetKind,
}

impl Dataset {
    pub fn new(observations: Vec<Observation>, target: TargetKind) -> Self {
        Dataset { observations, target }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Mean of the selected coefficient target over the whole dataset.
    pub fn target_mean(&self) -> f64 {
        if self.is_empty() {
            return f64::NAN;
        }
        let s: f64 = self.observations.iter().map(|o| o.target(self.target)).sum();
        s / self.len() as f64
    }

    /// Stable CSV schema: one row per observation, all telemetry components,
    /// spline derivatives, both targets and provenance.
    pub const CSV_HEADER: &'static str = "flight_id,interval_id,time_s,rho,tas_ms,alpha_rad,ff_kgps,sat_k,alt_m,mach,mass_kg,gamma_rad,tas_dot,gamma_dot,cd,cl";

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for o in &self.observations {
            let z = &o.z;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                o.flight_id,
                o.interval_id,
                o.time,
                z.rho,
                z.tas,
                z.alpha,
                z.fuel_flow,
                z.sat,
                z.altitude,
                z.mach,
                z.mass,
                z.gamma,
                o.tas_dot,
                o.gamma_dot,
                o.cd,
                o.cl
            ));
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn read_csv(path: &Path, target: TargetKind) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| Error::Csv { path: path.into(), msg: e.to_string() })?;
        let headers = rdr
            .headers()
            .map_err(|e| Error::Csv { path: path.into(), msg: e.to_string() })?
            .clone();
        let expected: Vec<&str> = Self::CSV_HEADER.split(',').collect();
        let got: Vec<&str> = headers.iter().collect();
        if got != expected {
            return Err(Error::Csv {
                path: path.into(),
                msg: format!("unexpected header {got:?}"),
            });
        }
        let mut observations = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Csv { path: path.into(), msg: e.to_string() })?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Schema {
                        file: path.display().to_string(),
                        row: line + 2,
                        msg: format!("missing column {i}"),
                    })?
                    .parse::<f64>()
                    .map_err(|e| Error::Schema {
                        file: path.display().to_string(),
                        row: line + 2,
                        msg: e.to_string(),
                    })
            };
            observations.push(Observation {
                flight_id: rec.get(0).unwrap_or_default().to_string(),
                interval_id: rec.get(1).and_then(|s| s.parse().ok()).unwrap_or(0),
                time: field(2)?,
                z: ZRecord {
                    rho: field(3)?,
                    tas: field(4)?,
                    alpha: field(5)?,
                    fuel_flow: field(6)?,
                    sat: field(7)?,
                    altitude: field(8)?,
                    mach: field(9)?,
                    mass: field(10)?,
                    gamma: field(11)?,
                },
                tas_dot: field(12)?,
                gamma_dot: field(13)?,
                cd: field(14)?,
                cl: field(15)?,
            });
        }
        Ok(Dataset { observations, target })
    }
}

/// Disjoint train/validation/test index partition of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSet {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl SplitSet {
    /// Partition sanity: disjoint and covering `n` indices.
    pub fn covers(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for &i in self.train.iter().chain(&self.validation).chain(&self.test) {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        seen.iter().all(|&s| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_obs(i: usize) -> Observation {
        Observation {
            flight_id: format!("F{i}"),
            interval_id: i,
            time: 10.0 * i as f64,
            z: ZRecord {
                rho: 0.38,
                tas: 231.0,
                alpha: 0.04 + 0.001 * i as f64,
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
    fn csv_round_trip_is_exact() {
        let ds = Dataset::new((0..5).map(sample_obs).collect(), TargetKind::Drag);
        let dir = std::env::temp_dir().join("aerocoef_ds_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ds.csv");
        ds.write_csv(&path).unwrap();
        let back = Dataset::read_csv(&path, TargetKind::Drag).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn split_cover_check() {
        let s = SplitSet { train: vec![0, 1], validation: vec![2], test: vec![3], seed: 0 };
        assert!(s.covers(4));
        assert!(!s.covers(5));
        let dup = SplitSet { train: vec![0, 1], validation: vec![1], test: vec![2], seed: 0 };
        assert!(!dup.covers(3));
    }
}
