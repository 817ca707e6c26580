//! Raw flight files to modeling dataset: unit conversion, spline smoothing
//! with derivatives, stable-interval segmentation, periodic sampling, target
//! computation and splitting.

pub mod ingest;
pub mod sample;
pub mod segment;
pub mod spline;
pub mod split;

pub use ingest::{read_flight_csv, to_si, write_flight_csv, RawFlight, RawIngest};
pub use sample::sample_intervals;
pub use segment::{segment_climb, segment_cruise, smooth_frame, SmoothedFrame, StableInterval};
pub use spline::SmoothedSeries;
pub use split::split;

use crate::config::{AppConfig, Phase};
use crate::dataset::Observation;
use crate::error::{Error, Result};
use crate::frame::{validate_frame, FlightFrame};

use serde::{Deserialize, Serialize};

/// Per-flight preprocessing outcome for the segmentation report.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct FlightReport {
    pub flight_id: String,
    pub intervals: usize,
    pub observations: usize,
    pub dropped_rows: usize,
    /// Diagnostic windows failing each condition.
    pub windows_failed_altitude: usize,
    pub windows_failed_heading: usize,
    pub windows_failed_wind: usize,
    /// Maximal cruise-level spans rejected by the stability conditions, s.
    pub rejected_spans: Vec<(f64, f64)>,
}

/// Full single-flight pipeline: validate, smooth, segment for the configured
/// phase, sample, and compute the coefficient targets.
pub fn preprocess_flight(
    frame: &FlightFrame,
    dropped_rows: usize,
    cfg: &AppConfig,
) -> Result<(Vec<Observation>, FlightReport)> {
    let violations = validate_frame(frame);
    if !violations.is_empty() {
        let v = &violations[0];
        return Err(Error::Schema {
            file: frame.flight_id.clone(),
            row: v.index,
            msg: format!("{} (+{} more violations)", v.kind, violations.len() - 1),
        });
    }
    let smoothed = smooth_frame(frame, &cfg.pipeline)?;
    let (intervals, diag) = match cfg.pipeline.phase {
        Phase::Cruise => segment_cruise(&smoothed, &cfg.pipeline),
        Phase::Climb => segment_climb(&smoothed, &cfg.pipeline),
    };
    let observations = sample_intervals(
        &intervals,
        &smoothed,
        &cfg.engine,
        cfg.pipeline.sample_period_s,
    )?;
    let report = FlightReport {
        flight_id: frame.flight_id.clone(),
        intervals: intervals.len(),
        observations: observations.len(),
        dropped_rows,
        windows_failed_altitude: diag.windows_failed_altitude,
        windows_failed_heading: diag.windows_failed_heading,
        windows_failed_wind: diag.windows_failed_wind,
        rejected_spans: diag.rejected_spans,
    };
    Ok((observations, report))
}
