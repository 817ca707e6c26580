//! Generate a small fleet of synthetic flights with ground-truth traces.
//!
//! ```sh
//! cargo run --example simulate
//! ```

use aerocoef::cli::cmd_simulate;
use aerocoef::config::AppConfig;
use aerocoef::simgen::profile::FleetSpec;

fn main() -> aerocoef::Result<()> {
    let cfg = AppConfig::default();
    let out = std::path::Path::new("target/example-out/sim");
    let manifest = cmd_simulate(&cfg, &FleetSpec::default(), 3, 42, out)?;
    println!("generated {} artifacts under {}", manifest.outputs.len(), out.display());
    for o in &manifest.outputs {
        println!("  {}", o.path);
    }
    Ok(())
}
