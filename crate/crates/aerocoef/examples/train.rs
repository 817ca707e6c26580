//! Fit the regression families on a preprocessed dataset and print the
//! aggregated error table.
//!
//! Uses a reduced family list and repetition count so the example runs in
//! seconds; pass nothing and edit the constants to go bigger.
//!
//! ```sh
//! cargo run --release --example train
//! ```

use aerocoef::config::AppConfig;
use aerocoef::dataset::{Dataset, TargetKind};
use aerocoef::learn::estimator::Family;
use aerocoef::learn::run_experiment;
use aerocoef::preprocess::preprocess_flight;
use aerocoef::simgen::profile::FleetSpec;
use aerocoef::simgen::{generate, GroundTruthPolar};

fn main() -> aerocoef::Result<()> {
    let cfg = AppConfig::default();
    let polar = GroundTruthPolar::default();
    let fleet = FleetSpec::default();

    let mut observations = Vec::new();
    for i in 0..4u64 {
        let mut rng = aerocoef::rng::stream(42, &[i]);
        let mut profile = fleet.sample_profile(&mut rng);
        profile.duration = 1_200.0;
        let (frame, _) = generate(&polar, &profile, &cfg.engine, &format!("f{i}"), 100 + i)?;
        let (obs, _) = preprocess_flight(&frame, 0, &cfg)?;
        observations.extend(obs);
    }
    println!("dataset: {} observations", observations.len());

    let families = [Family::Constant, Family::Linear, Family::Polynomial, Family::Tree];
    for target in [TargetKind::Drag, TargetKind::Lift] {
        let dataset = Dataset::new(observations.clone(), target);
        let table = run_experiment(&dataset, &families, 5, 7, &cfg.pipeline)?;
        println!("\n== {target} ==");
        print!("{}", table.to_csv());
    }
    Ok(())
}
