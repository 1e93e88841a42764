//! Physical constants, atomic species and unit conversions.
//!
//! Everything downstream works in SI base units. Non-SI values (cm, g/cm³,
//! mG, kHz, ...) are converted with [`convert_units`] at the edges.

mod units;

pub use units::{convert_named, convert_units, Unit};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

/// CODATA 2018 values.
pub mod codata {
    /// Newtonian constant of gravitation [m³ kg⁻¹ s⁻²].
    pub const G: f64 = 6.674_30e-11;
    /// Speed of light in vacuum [m/s].
    pub const C: f64 = 299_792_458.0;
    /// Planck constant [J s] (exact).
    pub const H: f64 = 6.626_070_15e-34;
    /// Reduced Planck constant [J s].
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Bohr radius [m].
    pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
    /// Atomic mass constant [kg].
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    /// Mass of ¹³³Cs in atomic mass units.
    pub const CS133_MASS_U: f64 = 132.905_451_961;
    /// Mass of ⁸⁷Rb in atomic mass units.
    pub const RB87_MASS_U: f64 = 86.909_180_531;
    /// Proton mass [kg].
    pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;
}

/// Default local gravitational acceleration [m/s²].
pub const DEFAULT_G_EARTH: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants<T> {
    /// Gravitational constant [m³ kg⁻¹ s⁻²].
    pub big_g: T,
    /// Speed of light [m/s].
    pub c: T,
    /// Reduced Planck constant [J s].
    pub hbar: T,
    /// Planck constant [J s].
    pub h: T,
    /// Bohr radius [m].
    pub bohr_radius: T,
    /// Local gravitational acceleration [m/s²].
    pub g_earth: T,
}

impl<T: Real> PhysicalConstants<T> {
    /// CODATA 2018 values with `g_earth = 9.81 m/s²`.
    ///
    /// `h` is derived as `2π·hbar` so the two stay consistent to rounding.
    pub fn codata2018() -> Self {
        let hbar = T::lit(codata::HBAR);
        Self {
            big_g: T::lit(codata::G),
            c: T::lit(codata::C),
            hbar,
            h: T::TAU() * hbar,
            bohr_radius: T::lit(codata::BOHR_RADIUS),
            g_earth: T::lit(DEFAULT_G_EARTH),
        }
    }

    /// Same constants with a different local `g`.
    pub fn with_g_earth(mut self, g_earth: T) -> Result<Self> {
        if !(g_earth > T::zero()) || !g_earth.is_finite() {
            return Err(Error::InvalidInput(format!(
                "g_earth must be positive and finite, got {g_earth}"
            )));
        }
        self.g_earth = g_earth;
        Ok(self)
    }

    pub fn c_squared(&self) -> T {
        self.c * self.c
    }

    pub fn all_positive(&self) -> bool {
        [self.big_g, self.c, self.hbar, self.h, self.bohr_radius, self.g_earth]
            .iter()
            .all(|v| *v > T::zero())
    }
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// An atom used as the interfering particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpecies {
    pub name: String,
    /// Mass [kg].
    pub mass: f64,
    /// s-wave scattering length [m].
    pub scattering_length: f64,
}

impl AtomSpecies {
    pub fn new(name: impl Into<String>, mass: f64, scattering_length: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidInput(format!("species mass must be positive, got {mass}")));
        }
        Ok(Self { name: name.into(), mass, scattering_length })
    }

    /// ¹³³Cs with the large scattering length used in the mean-field estimate (3000 a₀).
    pub fn cesium() -> Self {
        Self {
            name: "Cs".into(),
            mass: codata::CS133_MASS_U * codata::ATOMIC_MASS_UNIT,
            scattering_length: 3000.0 * codata::BOHR_RADIUS,
        }
    }

    /// ⁸⁷Rb, background scattering length ≈ 100 a₀.
    pub fn rubidium87() -> Self {
        Self {
            name: "Rb87".into(),
            mass: codata::RB87_MASS_U * codata::ATOMIC_MASS_UNIT,
            scattering_length: 100.0 * codata::BOHR_RADIUS,
        }
    }

    /// Atomic hydrogen approximated by the proton mass; no scattering length.
    pub fn hydrogen() -> Self {
        Self { name: "H".into(), mass: codata::PROTON_MASS, scattering_length: 0.0 }
    }

    /// Looks a species up by name, case-insensitively.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "cs" | "cs133" | "cs-133" | "cesium" | "caesium" => Ok(Self::cesium()),
            "rb" | "rb87" | "rb-87" | "rubidium" => Ok(Self::rubidium87()),
            "h" | "hydrogen" => Ok(Self::hydrogen()),
            _ => Err(Error::UnknownSpecies(name.to_string())),
        }
    }
}

/// Compton angular frequency `m c² / ħ` [rad/s].
pub fn compton_angular_frequency(species: &AtomSpecies, constants: &PhysicalConstants<f64>) -> Result<f64> {
    if !(species.mass > 0.0) || !species.mass.is_finite() {
        return Err(Error::InvalidInput(format!(
            "species mass must be positive, got {}",
            species.mass
        )));
    }
    Ok(species.mass * constants.c_squared() / constants.hbar)
}
