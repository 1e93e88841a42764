//! Source geometry optimisation.
//!
//! `ΔU/(G·ρ·s²)` between the midpoint and the inner stationary point of a
//! symmetric pair depends only on `L/R`, so the search is one-dimensional and
//! the requested `s` fixes the absolute scale afterwards.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::gravfield::SourceConfiguration;
use crate::num::Real;
use crate::numeric::golden_section_max;
use crate::stationary::{find_arm_positions, ArmPositions};

/// Golden-section bracket on `L/R`.
pub const SEARCH_LOWER: f64 = 2.05;
pub const SEARCH_UPPER: f64 = 6.0;
/// Final bracket width on `L/R`.
pub const SEARCH_WIDTH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryResult<T> {
    pub l_over_r: T,
    pub s_over_r: T,
    /// `ΔU/(G·ρ·s²)`
    pub coefficient: T,
    /// Centre-to-centre separation [m].
    pub separation: T,
    /// Sphere radius [m].
    pub radius: T,
    /// Arm separation [m].
    pub s: T,
    pub density: T,
    /// [m²/s²]
    pub potential_difference: T,
}

/// Dimensionless pair solution at a given `L/R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSolution<T> {
    pub l_over_r: T,
    pub s_over_r: T,
    pub coefficient: T,
}

/// Arm positions and `ΔU/(G·ρ·s²)` for an explicit pair.
pub fn solve_pair<T: Real>(
    separation: T,
    radius: T,
    density: T,
    constants: PhysicalConstants<T>,
) -> Result<(ArmPositions<T>, T)> {
    let cfg = SourceConfiguration::symmetric_pair(separation, radius, density, constants)?;
    let arms = find_arm_positions(&cfg)?;
    let s = arms.separation;
    let coefficient = arms.potential_difference / (constants.big_g * density * s * s);
    Ok((arms, coefficient))
}

/// Solves a unit-radius, unit-density pair at `L/R`.
pub fn solve_ratio<T: Real>(l_over_r: T, constants: PhysicalConstants<T>) -> Result<RatioSolution<T>> {
    if !(l_over_r > T::lit(2.0)) {
        return Err(Error::Overlap(0, 1));
    }
    let (arms, coefficient) = solve_pair(l_over_r, T::one(), T::one(), constants)?;
    Ok(RatioSolution { l_over_r, s_over_r: arms.separation, coefficient })
}

/// `ΔU/(G·ρ·s²)` at the given `L/R`.
pub fn coefficient_for_ratio<T: Real>(l_over_r: T, constants: PhysicalConstants<T>) -> Result<T> {
    solve_ratio(l_over_r, constants).map(|r| r.coefficient)
}

/// Maximises `ΔU` at fixed arm separation `s` and density `ρ`.
pub fn optimize_geometry<T: Real>(s: T, density: T, constants: PhysicalConstants<T>) -> Result<GeometryResult<T>> {
    if !(s > T::zero()) || !(density > T::zero()) {
        return Err(Error::InvalidInput(format!("s and ρ must be positive, got s={s}, ρ={density}")));
    }
    let best = golden_section_max(
        |ratio| coefficient_for_ratio(ratio, constants),
        T::lit(SEARCH_LOWER),
        T::lit(SEARCH_UPPER),
        T::lit(SEARCH_WIDTH),
    )?;
    let solution = solve_ratio(best.argmax, constants)?;
    Ok(scale_solution(&solution, s, density, constants))
}

/// Absolute geometry for a dimensionless solution at separation `s`.
pub fn scale_solution<T: Real>(
    solution: &RatioSolution<T>,
    s: T,
    density: T,
    constants: PhysicalConstants<T>,
) -> GeometryResult<T> {
    let radius = s / solution.s_over_r;
    GeometryResult {
        l_over_r: solution.l_over_r,
        s_over_r: solution.s_over_r,
        coefficient: solution.coefficient,
        separation: solution.l_over_r * radius,
        radius,
        s,
        density,
        potential_difference: solution.coefficient * constants.big_g * density * s * s,
    }
}

/// `(L/R, coefficient)` on a uniform grid over the search bracket.
pub fn scan_ratios<T: Real>(points: usize, constants: PhysicalConstants<T>) -> Result<Vec<(T, T)>> {
    if points < 2 {
        return Err(Error::InvalidInput("scan needs at least two points".into()));
    }
    let (lo, hi) = (T::lit(SEARCH_LOWER), T::lit(SEARCH_UPPER));
    let step = (hi - lo) / T::from_count(points - 1);
    (0..points)
        .map(|i| {
            let ratio = if i + 1 == points { hi } else { lo + step * T::from_count(i) };
            coefficient_for_ratio(ratio, constants).map(|c| (ratio, c))
        })
        .collect()
}
