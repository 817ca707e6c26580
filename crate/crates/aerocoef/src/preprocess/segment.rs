//! Stable-interval segmentation.
//!
//! Diagnostic windows (60 s long, stepping 10 s by default) slide over the
//! smoothed series. A window passes when the altitude and heading standard
//! deviations and the wind-derivative mean and standard deviation all stay
//! under their thresholds. A sample is stable only if it is covered by at
//! least one window and no window containing it fails — the conservative
//! variant, so a disturbance poisons every window that sees it. Maximal
//! stable runs longer than the minimum length become intervals.
//!
//! Cruise additionally requires the altitude to sit above a fraction of the
//! flight's peak level, which implements the top-of-climb/top-of-descent
//! window and drops low-altitude level-offs. Climb selects the complement:
//! from the 3000 ft floor up to the start of cruise, with only the heading
//! and wind conditions applied so genuine climb steps and level-offs are
//! retained.

use serde::{Deserialize, Serialize};

use crate::config::{Phase, PipelineConfig};
use crate::error::Result;
use crate::frame::FlightFrame;
use crate::preprocess::spline::SmoothedSeries;

/// All telemetry series of one flight, spline-smoothed.
pub struct SmoothedFrame {
    pub flight_id: String,
    /// Grid times (all slots, valid or not).
    pub time: Vec<f64>,
    pub altitude: SmoothedSeries,
    pub tas: SmoothedSeries,
    pub mach: SmoothedSeries,
    pub alpha: SmoothedSeries,
    pub gamma: SmoothedSeries,
    pub mass: SmoothedSeries,
    pub fuel_flow: SmoothedSeries,
    pub sat: SmoothedSeries,
    pub rho: SmoothedSeries,
    pub heading: SmoothedSeries,
    pub wind: SmoothedSeries,
    /// Validity of the underlying raw samples.
    pub valid: Vec<bool>,
}

/// A maximal span satisfying the stability conditions of its phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableInterval {
    pub flight_id: String,
    pub interval_id: usize,
    /// Start time, s.
    pub start: f64,
    /// End time, s (inclusive).
    pub end: f64,
    pub phase: Phase,
    /// Diagnostics over the whole interval.
    pub altitude_std: f64,
    pub heading_std: f64,
    pub wind_deriv_mean: f64,
    pub wind_deriv_std: f64,
}

impl StableInterval {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Window-failure tallies and rejected spans for the report.
#[derive(Debug, Clone, Default)]
pub struct SegmentDiagnostics {
    pub windows_failed_altitude: usize,
    pub windows_failed_heading: usize,
    pub windows_failed_wind: usize,
    pub rejected_spans: Vec<(f64, f64)>,
}

/// Smooth every series of a frame on its valid samples.
pub fn smooth_frame(frame: &FlightFrame, cfg: &PipelineConfig) -> Result<SmoothedFrame> {
    let idx: Vec<usize> = (0..frame.len()).filter(|&i| frame.valid[i]).collect();
    let t: Vec<f64> = idx.iter().map(|&i| frame.time[i]).collect();
    let pick = |s: &Vec<f64>| -> Vec<f64> { idx.iter().map(|&i| s[i]).collect() };
    let fit = |y: Vec<f64>| -> Result<SmoothedSeries> {
        SmoothedSeries::fit(&t, &y, cfg.spline_policy, cfg.spline_residual_cap)
    };
    // The angle series keep their raw scale; headings are assumed unwrapped
    // (no 2*pi crossings) for the stability analysis.
    Ok(SmoothedFrame {
        flight_id: frame.flight_id.clone(),
        time: frame.time.clone(),
        altitude: fit(pick(&frame.altitude))?,
        tas: fit(pick(&frame.tas))?,
        mach: fit(pick(&frame.mach))?,
        alpha: fit(pick(&frame.alpha))?,
        gamma: fit(pick(&frame.gamma))?,
        mass: fit(pick(&frame.mass))?,
        fuel_flow: fit(pick(&frame.fuel_flow))?,
        sat: fit(pick(&frame.sat))?,
        rho: fit(pick(&frame.rho))?,
        heading: fit(pick(&frame.heading))?,
        wind: fit(pick(&frame.wind))?,
        valid: frame.valid.clone(),
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

struct WindowPass {
    start: usize,
    end: usize,
    altitude_ok: bool,
    heading_ok: bool,
    wind_ok: bool,
    valid_ok: bool,
}

impl WindowPass {
    fn passes(&self) -> bool {
        self.altitude_ok && self.heading_ok && self.wind_ok && self.valid_ok
    }

    fn passes_climb(&self) -> bool {
        self.heading_ok && self.wind_ok && self.valid_ok
    }
}

struct GridSeries {
    altitude: Vec<f64>,
    heading: Vec<f64>,
    wind_deriv: Vec<f64>,
}

fn grid_series(sf: &SmoothedFrame) -> GridSeries {
    GridSeries {
        altitude: sf.time.iter().map(|&t| sf.altitude.eval(t)).collect(),
        heading: sf.time.iter().map(|&t| sf.heading.eval(t)).collect(),
        wind_deriv: sf.time.iter().map(|&t| sf.wind.deriv(t)).collect(),
    }
}

fn diagnostic_windows(sf: &SmoothedFrame, gs: &GridSeries, cfg: &PipelineConfig) -> Vec<WindowPass> {
    let n = sf.time.len();
    if n == 0 {
        return Vec::new();
    }
    let dt = if n >= 2 { sf.time[1] - sf.time[0] } else { 1.0 };
    let w_len = (cfg.window_s / dt).round() as usize;
    let w_step = (cfg.window_step_s / dt).round().max(1.0) as usize;
    if w_len + 1 > n {
        return Vec::new();
    }
    let mut starts: Vec<usize> = (0..)
        .map(|k| k * w_step)
        .take_while(|&s| s + w_len < n)
        .collect();
    // Anchor a final window at the end so the tail of the flight is covered.
    let last_start = n - 1 - w_len;
    if starts.last() != Some(&last_start) {
        starts.push(last_start);
    }
    let mut windows = Vec::new();
    for start in starts {
        let end = start + w_len; // inclusive
        let (_, alt_std) = mean_std(&gs.altitude[start..=end]);
        let (_, head_std) = mean_std(&gs.heading[start..=end]);
        let (wd_mean, wd_std) = mean_std(&gs.wind_deriv[start..=end]);
        windows.push(WindowPass {
            start,
            end,
            altitude_ok: alt_std < cfg.altitude_std_max,
            heading_ok: head_std < cfg.heading_std_max,
            wind_ok: wd_mean.abs() < cfg.wind_deriv_mean_max && wd_std < cfg.wind_deriv_std_max,
            valid_ok: sf.valid[start..=end].iter().all(|&v| v),
        });
    }
    windows
}

/// Per-sample stability verdict: covered by at least one window and
/// contained in no failing one.
fn stability_mask(
    n: usize,
    windows: &[WindowPass],
    pass: impl Fn(&WindowPass) -> bool,
) -> Vec<bool> {
    let mut covered = vec![false; n];
    let mut failed = vec![false; n];
    for w in windows {
        let flag: &mut Vec<bool> = if pass(w) { &mut covered } else { &mut failed };
        for i in w.start..=w.end {
            flag[i] = true;
        }
    }
    (0..n).map(|i| covered[i] && !failed[i]).collect()
}

fn runs(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < mask.len() {
        if mask[i] {
            let start = i;
            while i + 1 < mask.len() && mask[i + 1] {
                i += 1;
            }
            out.push((start, i));
        }
        i += 1;
    }
    out
}

fn build_interval(
    sf: &SmoothedFrame,
    gs: &GridSeries,
    id: usize,
    span: (usize, usize),
    phase: Phase,
) -> StableInterval {
    let (a, b) = span;
    let (_, alt_std) = mean_std(&gs.altitude[a..=b]);
    let (_, head_std) = mean_std(&gs.heading[a..=b]);
    let (wd_mean, wd_std) = mean_std(&gs.wind_deriv[a..=b]);
    StableInterval {
        flight_id: sf.flight_id.clone(),
        interval_id: id,
        start: sf.time[a],
        end: sf.time[b],
        phase,
        altitude_std: alt_std,
        heading_std: head_std,
        wind_deriv_mean: wd_mean,
        wind_deriv_std: wd_std,
    }
}

/// The stability conditions hold over the interval itself, not only per
/// window: a sub-threshold drift can pass every 60 s window yet wander far
/// over a long merged run. Runs failing the interval-level check are bisected
/// until every piece passes or falls under the minimum length.
fn enforce_interval_conditions(
    gs: &GridSeries,
    cfg: &PipelineConfig,
    dt: f64,
    span: (usize, usize),
    check_altitude: bool,
    out: &mut Vec<(usize, usize)>,
) {
    let (a, b) = span;
    if (b - a) as f64 * dt <= cfg.min_interval_s {
        return;
    }
    let (_, alt_std) = mean_std(&gs.altitude[a..=b]);
    let (_, head_std) = mean_std(&gs.heading[a..=b]);
    let (wd_mean, wd_std) = mean_std(&gs.wind_deriv[a..=b]);
    let ok = (!check_altitude || alt_std < cfg.altitude_std_max)
        && head_std < cfg.heading_std_max
        && wd_mean.abs() < cfg.wind_deriv_mean_max
        && wd_std < cfg.wind_deriv_std_max;
    if ok {
        out.push(span);
        return;
    }
    let mid = (a + b) / 2;
    if mid == a || mid + 1 > b {
        return;
    }
    enforce_interval_conditions(gs, cfg, dt, (a, mid), check_altitude, out);
    enforce_interval_conditions(gs, cfg, dt, (mid + 1, b), check_altitude, out);
}

fn tally(windows: &[WindowPass], diag: &mut SegmentDiagnostics) {
    for w in windows {
        if !w.altitude_ok {
            diag.windows_failed_altitude += 1;
        }
        if !w.heading_ok {
            diag.windows_failed_heading += 1;
        }
        if !w.wind_ok {
            diag.windows_failed_wind += 1;
        }
    }
}

/// Cruise segmentation: stable spans at cruise level between top of climb
/// and top of descent. May return no intervals.
pub fn segment_cruise(
    sf: &SmoothedFrame,
    cfg: &PipelineConfig,
) -> (Vec<StableInterval>, SegmentDiagnostics) {
    let n = sf.time.len();
    let gs = grid_series(sf);
    let windows = diagnostic_windows(sf, &gs, cfg);
    let mut diag = SegmentDiagnostics::default();
    tally(&windows, &mut diag);

    let h_max = gs.altitude.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let floor = cfg.cruise_floor_frac * h_max;
    let stable = stability_mask(n, &windows, WindowPass::passes);
    let mask: Vec<bool> =
        (0..n).map(|i| stable[i] && gs.altitude[i] >= floor).collect();

    let dt = if n >= 2 { sf.time[1] - sf.time[0] } else { 1.0 };
    let mut spans = Vec::new();
    for span in runs(&mask) {
        enforce_interval_conditions(&gs, cfg, dt, span, true, &mut spans);
    }
    let mut intervals = Vec::new();
    for span in spans {
        let dur = sf.time[span.1] - sf.time[span.0];
        if dur > cfg.min_interval_s {
            intervals.push(build_interval(sf, &gs, intervals.len(), span, Phase::Cruise));
        }
    }

    // Rejected spans: cruise-level seconds that the stability mask dropped.
    let rejected: Vec<bool> = (0..n).map(|i| !stable[i] && gs.altitude[i] >= floor).collect();
    diag.rejected_spans =
        runs(&rejected).into_iter().map(|(a, b)| (sf.time[a], sf.time[b])).collect();
    (intervals, diag)
}

/// Climb segmentation: from the configured altitude floor up to the start of
/// cruise, with heading and wind stability but no altitude condition.
pub fn segment_climb(
    sf: &SmoothedFrame,
    cfg: &PipelineConfig,
) -> (Vec<StableInterval>, SegmentDiagnostics) {
    let n = sf.time.len();
    let gs = grid_series(sf);
    let windows = diagnostic_windows(sf, &gs, cfg);
    let mut diag = SegmentDiagnostics::default();
    tally(&windows, &mut diag);

    // Top of climb: start of the first cruise interval, else the time of
    // peak altitude for flights that never settle into cruise.
    let (cruise, _) = segment_cruise(sf, cfg);
    let toc = cruise.first().map(|iv| iv.start).unwrap_or_else(|| {
        let arg = gs
            .altitude
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        sf.time[arg]
    });

    let stable = stability_mask(n, &windows, WindowPass::passes_climb);
    let mask: Vec<bool> = (0..n)
        .map(|i| stable[i] && gs.altitude[i] >= cfg.climb_floor_m && sf.time[i] < toc)
        .collect();

    let dt = if n >= 2 { sf.time[1] - sf.time[0] } else { 1.0 };
    let mut spans = Vec::new();
    for span in runs(&mask) {
        enforce_interval_conditions(&gs, cfg, dt, span, false, &mut spans);
    }
    let mut intervals = Vec::new();
    for span in spans {
        let dur = sf.time[span.1] - sf.time[span.0];
        if dur > cfg.min_interval_s {
            intervals.push(build_interval(sf, &gs, intervals.len(), span, Phase::Climb));
        }
    }
    (intervals, diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PipelineConfig;

    fn base_frame(n: usize, altitude: impl Fn(usize) -> f64) -> FlightFrame {
        FlightFrame {
            flight_id: "S1".into(),
            time: (0..n).map(|i| i as f64).collect(),
            altitude: (0..n).map(&altitude).collect(),
            tas: vec![230.0; n],
            mach: vec![0.78; n],
            alpha: vec![0.042; n],
            gamma: vec![0.0; n],
            mass: (0..n).map(|i| 62_000.0 - 0.6 * i as f64).collect(),
            fuel_flow: vec![0.64; n],
            sat: vec![219.0; n],
            rho: vec![0.38; n],
            heading: vec![1.57; n],
            wind: vec![0.0; n],
            valid: vec![true; n],
        }
    }

    fn cfg() -> PipelineConfig {
        PipelineConfig::default()
    }

    #[test]
    fn level_flight_gives_single_interval_spanning_cruise() {
        let frame = base_frame(600, |_| 10_668.0);
        let sf = smooth_frame(&frame, &cfg()).unwrap();
        let (ivs, _) = segment_cruise(&sf, &cfg());
        assert_eq!(ivs.len(), 1);
        assert_eq!(ivs[0].start, 0.0);
        assert_eq!(ivs[0].end, 599.0);
        assert!(ivs[0].altitude_std < cfg().altitude_std_max);
    }

    #[test]
    fn heading_turn_splits_the_cruise() {
        let n = 900;
        let turn = |i: usize| -> f64 {
            // 30 degree turn between 400 s and 460 s
            let x = ((i as f64 - 400.0) / 60.0).clamp(0.0, 1.0);
            1.0 + 0.5236 * (3.0 * x * x - 2.0 * x * x * x)
        };
        let mut frame = base_frame(n, |_| 10_668.0);
        frame.heading = (0..n).map(turn).collect();
        let sf = smooth_frame(&frame, &cfg()).unwrap();
        let (ivs, diag) = segment_cruise(&sf, &cfg());
        assert_eq!(ivs.len(), 2, "turn must split cruise: {ivs:?}");
        assert!(ivs[0].end < 400.0);
        assert!(ivs[1].start > 460.0);
        assert!(diag.windows_failed_heading > 0);
        assert!(!diag.rejected_spans.is_empty());
    }

    #[test]
    fn climb_step_is_excluded_from_cruise() {
        let n = 1200;
        let step = |i: usize| -> f64 {
            let x = ((i as f64 - 600.0) / 120.0).clamp(0.0, 1.0);
            10_058.0 + 609.6 * (3.0 * x * x - 2.0 * x * x * x)
        };
        let frame = base_frame(n, step);
        let sf = smooth_frame(&frame, &cfg()).unwrap();
        let (ivs, _) = segment_cruise(&sf, &cfg());
        assert_eq!(ivs.len(), 2, "{ivs:?}");
        // No interval may touch the material part of the ramp.
        for iv in &ivs {
            assert!(iv.end <= 600.0 || iv.start >= 720.0, "{iv:?}");
        }
    }

    #[test]
    fn initial_climb_is_not_cruise() {
        let n = 1500;
        let profile = |i: usize| -> f64 {
            let t = i as f64;
            if t < 700.0 {
                3_000.0 + (10_668.0 - 3_000.0) * (t / 700.0)
            } else {
                10_668.0
            }
        };
        let frame = base_frame(n, profile);
        let sf = smooth_frame(&frame, &cfg()).unwrap();
        let (ivs, _) = segment_cruise(&sf, &cfg());
        assert_eq!(ivs.len(), 1);
        assert!(ivs[0].start >= 700.0, "{ivs:?}");
    }

    #[test]
    fn climb_window_retains_level_off_and_stops_at_cruise() {
        let n = 2000;
        let profile = |i: usize| -> f64 {
            let t = i as f64;
            if t < 400.0 {
                1_000.0 + 6.0 * t
            } else if t < 520.0 {
                3_400.0 // 2 min level-off
            } else if t < 1_200.0 {
                3_400.0 + (10_668.0 - 3_400.0) * ((t - 520.0) / 680.0)
            } else {
                10_668.0
            }
        };
        let frame = base_frame(n, profile);
        let sf = smooth_frame(&frame, &cfg()).unwrap();
        let (climb, _) = segment_climb(&sf, &cfg());
        assert!(!climb.is_empty());
        let covered: f64 = climb.iter().map(|iv| iv.duration()).sum();
        assert!(covered > 800.0, "climb coverage {covered}");
        // The level-off lies inside the climb window.
        assert!(climb.iter().any(|iv| iv.start <= 430.0 && iv.end >= 500.0), "{climb:?}");
        // Nothing after cruise starts.
        for iv in &climb {
            assert!(iv.end <= 1_250.0);
        }
    }

    #[test]
    fn all_cruise_frame_has_no_climb() {
        let frame = base_frame(600, |_| 10_668.0);
        let sf = smooth_frame(&frame, &cfg()).unwrap();
        let (climb, _) = segment_climb(&sf, &cfg());
        assert!(climb.is_empty(), "{climb:?}");
    }

    #[test]
    fn stealthy_drift_cannot_merge_into_one_wide_interval() {
        // 0.2 m/s climb: every 60 s window std ~ 3.5 m (passes), but the
        // full-flight spread is 360 m. Interval-level enforcement must keep
        // each emitted interval's own altitude std under the threshold.
        let n = 1800;
        let frame = base_frame(n, |i| 10_400.0 + 0.2 * i as f64);
        let sf = smooth_frame(&frame, &cfg()).unwrap();
        let (ivs, _) = segment_cruise(&sf, &cfg());
        assert!(!ivs.is_empty());
        for iv in &ivs {
            assert!(
                iv.altitude_std < cfg().altitude_std_max,
                "interval std {} over threshold: {iv:?}",
                iv.altitude_std
            );
        }
    }

    #[test]
    fn interval_diagnostics_respect_admission_thresholds() {
        let n = 900;
        let frame = base_frame(n, |_| 10_668.0);
        let sf = smooth_frame(&frame, &cfg()).unwrap();
        let c = cfg();
        let (ivs, _) = segment_cruise(&sf, &c);
        for iv in &ivs {
            assert!(iv.altitude_std < c.altitude_std_max);
            assert!(iv.heading_std < c.heading_std_max);
            assert!(iv.wind_deriv_mean.abs() < c.wind_deriv_mean_max);
            assert!(iv.wind_deriv_std < c.wind_deriv_std_max);
            assert!(iv.duration() > c.min_interval_s);
        }
    }

    #[test]
    fn threshold_monotonicity_of_coverage() {
        // Shrinking a threshold never increases total covered duration.
        let n = 900;
        let wiggle = |i: usize| 10_668.0 + 2.0 * (i as f64 * 0.05).sin();
        let frame = base_frame(n, wiggle);
        let sf = smooth_frame(&frame, &cfg()).unwrap();
        let covered = |alt_max: f64| -> f64 {
            let mut c = cfg();
            c.altitude_std_max = alt_max;
            let (ivs, _) = segment_cruise(&sf, &c);
            ivs.iter().map(|iv| iv.duration()).sum()
        };
        let loose = covered(5.0);
        let tight = covered(1.0);
        let tighter = covered(0.2);
        assert!(tight <= loose);
        assert!(tighter <= tight);
    }
}
