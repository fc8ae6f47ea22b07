//! Simulation engine for vortex-superposition states in exciton-polariton
//! condensates, together with the optics used to seed them and the
//! closed-form Sagnac metrology used to judge them as gyroscopes.

pub mod analysis;
pub mod field;
pub mod landscape;
pub mod metrology;
pub mod oam;
pub mod snapshot;
pub mod solver;
pub mod spectral;

pub use field::{Boundary, ComplexField, GridSpec, RealField, SimParams, UnitSystem};
pub use num_complex::Complex64;
