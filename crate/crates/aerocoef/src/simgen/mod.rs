//! Synthetic flight generation with known ground truth.
//!
//! Replaces proprietary recorded data for verification: every generated
//! flight satisfies the point-mass force balance exactly at each step (before
//! sensor noise), carries a sibling trace of the true coefficients, and
//! perturbs the fuel-flow channel with a smooth relative-error process so the
//! recovered targets exhibit a controlled physical approximation error.

pub mod generate;
pub mod polar;
pub mod profile;

pub use generate::{generate, inject_disturbance, GroundTruthTrace};
pub use polar::GroundTruthPolar;
pub use profile::{Disturbance, FlightProfile, SensorNoise, SfcErrorProcess};
