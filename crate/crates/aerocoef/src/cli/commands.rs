//! The five pipeline commands. Each returns the manifest it wrote.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::cli::manifest::RunManifest;
use crate::config::AppConfig;
use crate::dataset::{Dataset, TargetKind};
use crate::error::{Error, Result};
use crate::learn::cv::cv_select;
use crate::learn::curves::{prediction_curves, write_curves_csv};
use crate::learn::data::TrainData;
use crate::learn::estimator::{fit, EstimatorSpec, Family, TrainedEstimator};
use crate::learn::experiment::{bound_report, run_experiment, ExperimentTable};
use crate::physics::bounds::BoundInputs;
use crate::preprocess::{preprocess_flight, read_flight_csv, split, FlightReport};
use crate::rng;
use crate::simgen::profile::FleetSpec;
use crate::simgen::{generate, GroundTruthPolar};

const TAG_SIM_PROFILE: u64 = 0x51;
const TAG_SIM_FLIGHT: u64 = 0x52;
const TAG_FINAL_FIT: u64 = 0xf1;

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Generate `n_flights` synthetic flights plus their ground-truth traces.
pub fn cmd_simulate(
    cfg: &AppConfig,
    fleet: &FleetSpec,
    n_flights: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<RunManifest> {
    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new("simulate", seed, &cfg.to_json());
    let start = Instant::now();
    let polar = GroundTruthPolar::default();
    for i in 0..n_flights {
        let mut profile_rng = rng::stream(seed, &[TAG_SIM_PROFILE, i as u64]);
        let profile = fleet.sample_profile(&mut profile_rng);
        let flight_id = format!("flight_{i:03}");
        let (frame, trace) = generate(
            &polar,
            &profile,
            &cfg.engine,
            &flight_id,
            rng::derive_key(seed, &[TAG_SIM_FLIGHT, i as u64]),
        )?;
        let flight_path = out_dir.join(format!("{flight_id}.csv"));
        let truth_path = out_dir.join(format!("truth_{i:03}.csv"));
        crate::preprocess::write_flight_csv(&frame, &flight_path)?;
        trace.write_csv(&truth_path)?;
        manifest.record_output(&flight_path)?;
        manifest.record_output(&truth_path)?;
    }
    manifest.record_timing("simulate", start.elapsed());
    manifest.write(out_dir)?;
    Ok(manifest)
}

/// Expand directories into the flight files they contain.
fn expand_flights(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|f| {
                    f.file_name()
                        .map(|n| {
                            let n = n.to_string_lossy();
                            n.starts_with("flight_") && n.ends_with(".csv")
                        })
                        .unwrap_or(false)
                })
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid("no flight files found".into()));
    }
    Ok(out)
}

/// Preprocess raw flights into the modeling dataset plus a segmentation
/// report.
pub fn cmd_preprocess(
    flights: &[PathBuf],
    cfg: &AppConfig,
    out_dir: &Path,
) -> Result<RunManifest> {
    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new("preprocess", cfg.pipeline.seed, &cfg.to_json());
    let start = Instant::now();
    let files = expand_flights(flights)?;
    let mut observations = Vec::new();
    let mut reports: Vec<FlightReport> = Vec::new();
    for file in &files {
        manifest.record_input(file);
        let ingest = read_flight_csv(file)?;
        let (obs, report) = preprocess_flight(&ingest.frame, ingest.dropped_rows, cfg)?;
        observations.extend(obs);
        reports.push(report);
    }
    let dataset = Dataset::new(observations, TargetKind::Drag);
    let dataset_path = out_dir.join("dataset.csv");
    dataset.write_csv(&dataset_path)?;
    let report_path = out_dir.join("segmentation_report.json");
    let report_text = serde_json::to_string_pretty(&reports)
        .map_err(|e| Error::Invalid(format!("report serialization: {e}")))?;
    std::fs::write(&report_path, report_text).map_err(|e| Error::io(&report_path, e))?;
    manifest.record_output(&dataset_path)?;
    manifest.record_output(&report_path)?;
    manifest.record_timing("preprocess", start.elapsed());
    manifest.write(out_dir)?;
    Ok(manifest)
}

fn experiment_paths(out_dir: &Path, target: TargetKind) -> (PathBuf, PathBuf) {
    (
        out_dir.join(format!("experiment_{target}.csv")),
        out_dir.join(format!("experiment_{target}.json")),
    )
}

/// Run the repetition harness on both targets and persist one final model
/// per family per target.
pub fn cmd_train(
    dataset_path: &Path,
    families: &[Family],
    repetitions: usize,
    seed: u64,
    cfg: &AppConfig,
    out_dir: &Path,
) -> Result<RunManifest> {
    ensure_dir(out_dir)?;
    let models_dir = out_dir.join("models");
    ensure_dir(&models_dir)?;
    let mut manifest = RunManifest::new("train", seed, &cfg.to_json());
    manifest.record_input(dataset_path);
    let start = Instant::now();
    for target in [TargetKind::Drag, TargetKind::Lift] {
        let dataset = Dataset::read_csv(dataset_path, target)?;
        let table = run_experiment(&dataset, families, repetitions, seed, &cfg.pipeline)?;
        let (csv_path, json_path) = experiment_paths(out_dir, target);
        std::fs::write(&csv_path, table.to_csv()).map_err(|e| Error::io(&csv_path, e))?;
        let json = serde_json::to_string_pretty(&table)
            .map_err(|e| Error::Invalid(format!("table serialization: {e}")))?;
        std::fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;
        manifest.record_output(&csv_path)?;
        manifest.record_output(&json_path)?;

        // One final fit per family on a dedicated split for persistence.
        let final_seed = rng::derive_key(seed, &[TAG_FINAL_FIT]);
        let sp = split(&dataset, cfg.pipeline.split_fractions, final_seed, cfg.pipeline.split_by_flight)?;
        let train = TrainData::gather(&dataset, &sp.train);
        let val = TrainData::gather(&dataset, &sp.validation);
        for &family in families {
            let grid = EstimatorSpec::default_grid(family);
            let record = cv_select(&grid, &train, 3, final_seed, Some(&val))?;
            let est = fit(&record.selected, &train, Some(&val), final_seed)?;
            let path = models_dir.join(format!("{target}_{family}.json"));
            est.save(&path)?;
            manifest.record_output(&path)?;
        }
    }
    manifest.record_timing("train", start.elapsed());
    manifest.write(out_dir)?;
    Ok(manifest)
}

/// Total-error bound tables from experiment tables plus the dataset.
/// For the climb phase no physical error level exists, so the command emits
/// learning-error tables only and says so.
pub fn cmd_bounds(
    tables: &[PathBuf],
    dataset_path: &Path,
    cfg: &AppConfig,
    out_dir: &Path,
) -> Result<RunManifest> {
    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new("bounds", cfg.pipeline.seed, &cfg.to_json());
    manifest.record_input(dataset_path);
    let start = Instant::now();

    let sfc_rel = cfg.pipeline.sfc_rel_error();
    if sfc_rel.is_none() {
        eprintln!(
            "note: no SFC error level is available for phase `{}`; emitting learning errors only",
            cfg.pipeline.phase
        );
    }

    for table_path in tables {
        manifest.record_input(table_path);
        let text =
            std::fs::read_to_string(table_path).map_err(|e| Error::io(table_path, e))?;
        let table: ExperimentTable = serde_json::from_str(&text)
            .map_err(|e| Error::Invalid(format!("{}: {e}", table_path.display())))?;

        let overrides = cfg.pipeline.bound_overrides.clone().unwrap_or_default();
        let dataset = Dataset::read_csv(dataset_path, table.target)?;
        let (r, mean_phi) = match sfc_rel {
            None => {
                let mean = match table.target {
                    TargetKind::Drag => overrides.mean_phi_cd,
                    TargetKind::Lift => overrides.mean_phi_cl,
                };
                (None, mean.unwrap_or_else(|| dataset.target_mean()))
            }
            Some(rel) => {
                let inputs = BoundInputs::from_dataset(&dataset, &cfg.engine, rel)?;
                match table.target {
                    TargetKind::Drag => (
                        Some(overrides.r_cd.unwrap_or(inputs.r_cd)),
                        overrides.mean_phi_cd.unwrap_or(inputs.mean_cd),
                    ),
                    TargetKind::Lift => (
                        Some(overrides.r_cl.unwrap_or(inputs.r_cl)),
                        overrides.mean_phi_cl.unwrap_or(inputs.mean_cl),
                    ),
                }
            }
        };
        let report = bound_report(&table, r, mean_phi);
        let csv_path = out_dir.join(format!("bounds_{}.csv", table.target));
        std::fs::write(&csv_path, report.to_csv()).map_err(|e| Error::io(&csv_path, e))?;
        let json_path = out_dir.join(format!("bounds_{}.json", table.target));
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Invalid(format!("report serialization: {e}")))?;
        std::fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;
        manifest.record_output(&csv_path)?;
        manifest.record_output(&json_path)?;
    }
    manifest.record_timing("bounds", start.elapsed());
    manifest.write(out_dir)?;
    Ok(manifest)
}

/// Prediction-curve emission for a persisted model.
pub fn cmd_curves(
    model_path: &Path,
    alphas_rad: &[f64],
    mach_grid: &[f64],
    out_dir: &Path,
) -> Result<RunManifest> {
    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new("curves", 0, "{}");
    manifest.record_input(model_path);
    let start = Instant::now();
    let est = TrainedEstimator::load(model_path)?;
    for &a in alphas_rad {
        if a < est.alpha_support.0 || a > est.alpha_support.1 {
            eprintln!(
                "warning: alpha {a:.4} rad outside the training support [{:.4}, {:.4}]; curve emitted anyway",
                est.alpha_support.0, est.alpha_support.1
            );
        }
    }
    let points = prediction_curves(&est, alphas_rad, mach_grid)?;
    let path = out_dir.join("curves.csv");
    write_curves_csv(&points, &path)?;
    manifest.record_output(&path)?;
    manifest.record_timing("curves", start.elapsed());
    manifest.write(out_dir)?;
    Ok(manifest)
}
