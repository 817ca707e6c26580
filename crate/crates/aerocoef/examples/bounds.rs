//! Certify fitted models with total-error bounds.
//!
//! Shows both halves of the bound: the physical error bound derived from the
//! dataset's sensitivity constants and the SFC error level, and the learning
//! MAE from the experiment table.
//!
//! ```sh
//! cargo run --example bounds
//! ```

use aerocoef::config::AppConfig;
use aerocoef::dataset::{Dataset, TargetKind};
use aerocoef::learn::estimator::Family;
use aerocoef::learn::{bound_report, run_experiment};
use aerocoef::physics::bounds::BoundInputs;
use aerocoef::preprocess::preprocess_flight;
use aerocoef::simgen::profile::FleetSpec;
use aerocoef::simgen::{generate, GroundTruthPolar};

fn main() -> aerocoef::Result<()> {
    let cfg = AppConfig::default();
    let polar = GroundTruthPolar::default();
    let fleet = FleetSpec::default();

    let mut observations = Vec::new();
    for i in 0..4u64 {
        let mut rng = aerocoef::rng::stream(1, &[i]);
        let mut profile = fleet.sample_profile(&mut rng);
        profile.duration = 1_200.0;
        let (frame, _) = generate(&polar, &profile, &cfg.engine, &format!("f{i}"), 200 + i)?;
        let (obs, _) = preprocess_flight(&frame, 0, &cfg)?;
        observations.extend(obs);
    }

    let rel = cfg.pipeline.sfc_rel_error().expect("cruise error level");
    for target in [TargetKind::Drag, TargetKind::Lift] {
        let dataset = Dataset::new(observations.clone(), target);
        let inputs = BoundInputs::from_dataset(&dataset, &cfg.engine, rel)?;
        let (r, mean_phi) = match target {
            TargetKind::Drag => (inputs.r_cd, inputs.mean_cd),
            TargetKind::Lift => (inputs.r_cl, inputs.mean_cl),
        };
        let table = run_experiment(
            &dataset,
            &[Family::Constant, Family::Linear, Family::Polynomial],
            5,
            7,
            &cfg.pipeline,
        )?;
        let report = bound_report(&table, Some(r), mean_phi);
        println!("== {target}: r = {r:.3e}, mean = {mean_phi:.3e} ==");
        print!("{}", report.to_csv());
    }
    Ok(())
}
