//! The whole pipeline in one go, library-level: simulate a fleet, preprocess
//! it, train two families, certify them, and check the recovered
//! coefficients against the generator's ground truth.
//!
//! ```sh
//! cargo run --release --example pipeline
//! ```

use aerocoef::config::AppConfig;
use aerocoef::dataset::{Dataset, TargetKind};
use aerocoef::learn::estimator::Family;
use aerocoef::learn::{bound_report, run_experiment};
use aerocoef::physics::bounds::BoundInputs;
use aerocoef::preprocess::preprocess_flight;
use aerocoef::simgen::profile::{FleetSpec, SensorNoise, SfcErrorProcess};
use aerocoef::simgen::{generate, GroundTruthPolar};

fn main() -> aerocoef::Result<()> {
    let cfg = AppConfig::default();
    let polar = GroundTruthPolar::default();
    let fleet = FleetSpec::default();

    // Zero-noise leg first: the round trip must be essentially exact.
    let mut quiet = fleet.base.clone();
    quiet.duration = 900.0;
    quiet.noise = SensorNoise::none();
    quiet.sfc_error = SfcErrorProcess { mean_abs: 0.0, correlation_time: 600.0 };
    let (frame, trace) = generate(&polar, &quiet, &cfg.engine, "probe", 1)?;
    let (obs, _) = preprocess_flight(&frame, 0, &cfg)?;
    let worst = obs
        .iter()
        .map(|o| {
            let i = trace.time.iter().position(|&t| (t - o.time).abs() < 1e-9).unwrap();
            ((o.cd - trace.cd[i]).abs() / trace.cd[i])
                .max((o.cl - trace.cl[i]).abs() / trace.cl[i])
        })
        .fold(0.0, f64::max);
    println!("zero-noise recovery: worst relative error {worst:.2e}");

    // Realistic leg: SFC error process on, train and certify.
    let mut observations = Vec::new();
    for i in 0..5u64 {
        let mut rng = aerocoef::rng::stream(77, &[i]);
        let mut profile = fleet.sample_profile(&mut rng);
        profile.duration = 1_500.0;
        let (frame, _) = generate(&polar, &profile, &cfg.engine, &format!("f{i}"), 400 + i)?;
        let (obs, _) = preprocess_flight(&frame, 0, &cfg)?;
        observations.extend(obs);
    }
    println!("fleet dataset: {} observations", observations.len());
    let rel = cfg.pipeline.sfc_rel_error().unwrap();
    for target in [TargetKind::Drag, TargetKind::Lift] {
        let dataset = Dataset::new(observations.clone(), target);
        let inputs = BoundInputs::from_dataset(&dataset, &cfg.engine, rel)?;
        let (r, mean_phi) = match target {
            TargetKind::Drag => (inputs.r_cd, inputs.mean_cd),
            TargetKind::Lift => (inputs.r_cl, inputs.mean_cl),
        };
        let table =
            run_experiment(&dataset, &[Family::Linear, Family::Polynomial], 10, 3, &cfg.pipeline)?;
        let report = bound_report(&table, Some(r), mean_phi);
        println!("\n== {target} ==");
        print!("{}", report.to_csv());
    }
    Ok(())
}
