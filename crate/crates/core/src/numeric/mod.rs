//! Scalar numerical routines used by the physics modules.

pub mod golden;
pub mod quadrature;

pub use golden::{golden_section_max, GoldenResult};
pub use quadrature::{adaptive_simpson, Quadrature};
