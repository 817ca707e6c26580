//! Deterministic aeronautic formulas.
//!
//! Everything here is a pure function: atmosphere relations, the parametric
//! specific-fuel-consumption model, the inverse-dynamics coefficient
//! estimates, and the error-bound arithmetic that certifies a fitted model.

pub mod bounds;
pub mod inverse;
pub mod isa;
pub mod sfc;

pub use bounds::{
    physical_error_bound, sensitivity_constants, total_error_bound_abs, total_error_bound_rel,
    BoundInputs,
};
pub use inverse::{drag_coefficient, lift_coefficient, steady_coefficients};
pub use isa::{isa_density, isa_pressure, isa_temperature, mach_from_tas, speed_of_sound, R_AIR};
pub use sfc::{specific_fuel_consumption, SfcValue};
