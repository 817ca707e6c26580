//! File-based orchestration of the pipeline behind the `aerocoef` binary.
//!
//! Every command reads a config JSON (built-in defaults when absent), writes
//! all results as files into `--out`, and drops a manifest listing every
//! artifact with its content hash. Data artifacts are byte-identical across
//! repeat runs with the same inputs and seed; only the manifest's timing
//! section varies.

pub mod commands;
pub mod manifest;

pub use commands::{cmd_bounds, cmd_curves, cmd_preprocess, cmd_simulate, cmd_train};
pub use manifest::RunManifest;
