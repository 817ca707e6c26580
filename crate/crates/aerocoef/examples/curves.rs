//! Emit prediction curves over Mach for fixed angles of attack, with the
//! spline-smoothed overlay used to read tendencies off tree-based models.
//!
//! ```sh
//! cargo run --example curves
//! ```

use aerocoef::config::AppConfig;
use aerocoef::dataset::{Dataset, TargetKind};
use aerocoef::learn::curves::write_curves_csv;
use aerocoef::learn::estimator::{fit, EstimatorSpec};
use aerocoef::learn::prediction_curves;
use aerocoef::learn::TrainData;
use aerocoef::preprocess::preprocess_flight;
use aerocoef::simgen::profile::FleetSpec;
use aerocoef::simgen::{generate, GroundTruthPolar};

fn main() -> aerocoef::Result<()> {
    let cfg = AppConfig::default();
    let polar = GroundTruthPolar::default();
    let fleet = FleetSpec::default();

    let mut observations = Vec::new();
    for i in 0..4u64 {
        let mut rng = aerocoef::rng::stream(9, &[i]);
        let mut profile = fleet.sample_profile(&mut rng);
        profile.duration = 1_200.0;
        let (frame, _) = generate(&polar, &profile, &cfg.engine, &format!("f{i}"), 300 + i)?;
        let (obs, _) = preprocess_flight(&frame, 0, &cfg)?;
        observations.extend(obs);
    }
    let dataset = Dataset::new(observations, TargetKind::Drag);
    let all: Vec<usize> = (0..dataset.len()).collect();
    let train = TrainData::gather(&dataset, &all);
    let est = fit(&EstimatorSpec::Tree { max_depth: 5 }, &train, None, 0)?;

    let alphas: Vec<f64> = [2.0, 2.25, 2.5, 2.75, 3.0].iter().map(|d: &f64| d.to_radians()).collect();
    let grid: Vec<f64> = (0..60).map(|i| 0.74 + 0.08 * i as f64 / 59.0).collect();
    let points = prediction_curves(&est, &alphas, &grid)?;

    std::fs::create_dir_all("target/example-out").ok();
    let path = std::path::Path::new("target/example-out/curves.csv");
    write_curves_csv(&points, path)?;
    println!("wrote {} curve points to {}", points.len(), path.display());
    Ok(())
}
