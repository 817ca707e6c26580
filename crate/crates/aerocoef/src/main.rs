//! Thin command-line front end over the library pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aerocoef::cli;
use aerocoef::config::{AppConfig, Phase};
use aerocoef::learn::estimator::Family;
use aerocoef::simgen::profile::FleetSpec;

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn parse_phase(s: &str) -> Result<Phase, String> {
    s.parse::<Phase>().map_err(|e| e.to_string())
}

#[derive(Parser)]
#[command(
    name = "aerocoef",
    version,
    about = "Drag/lift coefficient estimation from flight telemetry with total-error bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic flights with ground-truth traces.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        n_flights: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn raw flight CSVs into the modeling dataset.
    Preprocess {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Flight phase to segment (cruise or climb).
        #[arg(long, value_parser = parse_phase)]
        phase: Option<Phase>,
        /// Flight CSV files or directories containing flight_*.csv.
        #[arg(required = true)]
        flights: Vec<PathBuf>,
    },
    /// Run the repetition harness and persist per-family models.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            value_parser = parse_family,
            default_value = "constant,linear,polynomial,svr,knn,tree,forest,gbt"
        )]
        families: Vec<Family>,
        #[arg(long, default_value_t = 100)]
        repetitions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Preprocessed dataset CSV.
        dataset: PathBuf,
    },
    /// Total-error bound tables from experiment tables plus the dataset.
    Bounds {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_phase)]
        phase: Option<Phase>,
        /// Experiment table JSON files from `train`.
        #[arg(long, required = true)]
        table: Vec<PathBuf>,
        /// Preprocessed dataset CSV.
        dataset: PathBuf,
    },
    /// Prediction curves over Mach for fixed angles of attack.
    Curves {
        #[arg(long)]
        model: PathBuf,
        /// Angles of attack in degrees, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2.0,2.25,2.5,2.75,3.0")]
        alphas_deg: Vec<f64>,
        #[arg(long, default_value_t = 0.70)]
        mach_min: f64,
        #[arg(long, default_value_t = 0.85)]
        mach_max: f64,
        #[arg(long, default_value_t = 50)]
        mach_steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &Option<PathBuf>, phase: Option<Phase>) -> aerocoef::Result<AppConfig> {
    let mut cfg = match path {
        Some(p) => AppConfig::load(p)?,
        None => AppConfig::default(),
    };
    if let Some(phase) = phase {
        cfg.pipeline.phase = phase;
    }
    Ok(cfg)
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn run(cli: Cli) -> Result<ExitCode, aerocoef::Error> {
    match cli.command {
        Command::Simulate { config, n_flights, seed, out } => {
            let cfg = load_config(&config, None)?;
            cli::cmd_simulate(&cfg, &FleetSpec::default(), n_flights, seed, &out)?;
            println!("wrote {n_flights} flights to {}", out.display());
        }
        Command::Preprocess { config, out, phase, flights } => {
            let cfg = load_config(&config, phase)?;
            let manifest = cli::cmd_preprocess(&flights, &cfg, &out)?;
            println!(
                "preprocessed {} flights into {}",
                manifest.inputs.len(),
                out.display()
            );
        }
        Command::Train { config, out, families, repetitions, seed, dataset } => {
            if families.is_empty() {
                return Ok(usage_error("at least one family is required"));
            }
            let cfg = load_config(&config, None)?;
            cli::cmd_train(&dataset, &families, repetitions, seed, &cfg, &out)?;
            println!(
                "trained {} families x {repetitions} repetitions into {}",
                families.len(),
                out.display()
            );
        }
        Command::Bounds { config, out, phase, table, dataset } => {
            let cfg = load_config(&config, phase)?;
            cli::cmd_bounds(&table, &dataset, &cfg, &out)?;
            println!("wrote bound tables to {}", out.display());
        }
        Command::Curves { model, alphas_deg, mach_min, mach_max, mach_steps, out } => {
            if mach_steps < 4 || !(mach_max > mach_min) {
                return Ok(usage_error(
                    "the Mach grid needs mach_min < mach_max and at least 4 steps",
                ));
            }
            let alphas: Vec<f64> = alphas_deg.iter().map(|d| d.to_radians()).collect();
            let grid: Vec<f64> = (0..mach_steps)
                .map(|i| mach_min + (mach_max - mach_min) * i as f64 / (mach_steps - 1) as f64)
                .collect();
            cli::cmd_curves(&model, &alphas, &grid, &out)?;
            println!("wrote curves to {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
