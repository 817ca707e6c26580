//! Aircraft drag and lift coefficient estimation from recorded flight telemetry.
//!
//! The coefficients are never measured directly: they are reconstructed from
//! point-mass flight dynamics (force balance plus a parametric specific-fuel-
//! consumption model) and then regressed against angle of attack and Mach
//! number with a small zoo of classical estimators. Every fitted model is
//! certified with a total-error bound that adds the physical approximation
//! error of the reconstruction to the statistical learning error.
//!
//! The crate is organised along the pipeline:
//!
//! - [`config`] — engine/airframe constants and pipeline settings, one JSON file.
//! - [`frame`] — 1 Hz telemetry container and its validity checks.
//! - [`physics`] — ISA relations, the SFC model, inverse-dynamics coefficient
//!   formulas and the error-bound calculators.
//! - [`preprocess`] — smoothing splines, stable-interval segmentation,
//!   periodic sampling and dataset splitting.
//! - [`learn`] — eight regression families, 3-fold CV selection, metrics,
//!   the repetition harness and bound reports.
//! - [`simgen`] — synthetic flight generator with a known ground-truth polar,
//!   used as the verification oracle.
//! - [`cli`] — file-based orchestration behind the `aerocoef` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod frame;
pub mod learn;
pub mod physics;
pub mod preprocess;
pub mod rng;
pub mod simgen;

pub use config::{AppConfig, EngineParams, PipelineConfig};
pub use dataset::{Dataset, Observation, SplitSet, TargetKind};
pub use error::{Error, Result};
pub use frame::FlightFrame;
