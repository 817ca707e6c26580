//! Turn raw flight CSVs into the modeling dataset.
//!
//! Generates its own input flights first, then runs ingestion, smoothing,
//! segmentation and sampling, and prints the per-flight report.
//!
//! ```sh
//! cargo run --example preprocess
//! ```

use aerocoef::cli::{cmd_preprocess, cmd_simulate};
use aerocoef::config::AppConfig;
use aerocoef::simgen::profile::FleetSpec;

fn main() -> aerocoef::Result<()> {
    let cfg = AppConfig::default();
    let sim = std::path::PathBuf::from("target/example-out/sim");
    cmd_simulate(&cfg, &FleetSpec::default(), 3, 42, &sim)?;
    let out = std::path::Path::new("target/example-out/pre");
    cmd_preprocess(&[sim], &cfg, out)?;
    let report = std::fs::read_to_string(out.join("segmentation_report.json")).unwrap();
    println!("dataset: {}", out.join("dataset.csv").display());
    println!("{report}");
    Ok(())
}
