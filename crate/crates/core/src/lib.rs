//! Design and analysis toolkit for a force-free gravitational redshift
//! (gravitostatic Aharonov-Bohm) atom interferometer.
//!
//! Two source spheres create a potential whose gradient vanishes at the two
//! interferometer arms while the potential itself differs. The crate computes
//! that field, finds the force-free points, optimises the source geometry,
//! evaluates the signal and systematic phase formulas, integrates proper time
//! along arm trajectories, and assembles the error budget.
//!
//! The numerical core ([`gravfield`], [`stationary`], [`geomopt`], [`numeric`],
//! [`linalg`]) is generic over the scalar type; the aliases below fix it to
//! `f64`, which is what the phase, sequence and budget layers use.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod constants;
pub mod error;
pub mod geomopt;
pub mod gravfield;
pub mod linalg;
pub mod num;
pub mod numeric;
pub mod phases;
pub mod sequence;
pub mod stationary;

pub use constants::{compton_angular_frequency, convert_units, AtomSpecies, Unit};
pub use error::{Error, Result};
pub use num::Real;

pub type Vector3 = linalg::Vec3<f64>;
pub type Matrix3 = linalg::Mat3<f64>;
pub type PhysicalConstants = constants::PhysicalConstants<f64>;
pub type SphereSource = gravfield::Sphere<f64>;
pub type SourceConfiguration = gravfield::SourceConfiguration<f64>;
pub type FieldSample = gravfield::FieldSample<f64>;
pub type StationaryPoint = stationary::StationaryPoint<f64>;
pub type ArmPositions = stationary::ArmPositions<f64>;
pub type GeometryResult = geomopt::GeometryResult<f64>;

/// Single-precision variants of the numerical core.
pub mod f32 {
    pub type Vector3 = crate::linalg::Vec3<f32>;
    pub type PhysicalConstants = crate::constants::PhysicalConstants<f32>;
    pub type SphereSource = crate::gravfield::Sphere<f32>;
    pub type SourceConfiguration = crate::gravfield::SourceConfiguration<f32>;
    pub type StationaryPoint = crate::stationary::StationaryPoint<f32>;
    pub type GeometryResult = crate::geomopt::GeometryResult<f32>;
}
