use std::fmt;
use std::str::FromStr;

use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The fixed set of units accepted at ingestion and emitted in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    Meter,
    Centimeter,
    Millimeter,
    Micrometer,
    Nanometer,
    KilogramPerCubicMeter,
    GramPerCubicCentimeter,
    PerCubicMeter,
    PerCubicCentimeter,
    Gauss,
    Milligauss,
    Hertz,
    Kilohertz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Length,
    MassDensity,
    NumberDensity,
    MagneticField,
    Frequency,
}

impl Unit {
    fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Meter | Centimeter | Millimeter | Micrometer | Nanometer => Dimension::Length,
            KilogramPerCubicMeter | GramPerCubicCentimeter => Dimension::MassDensity,
            PerCubicMeter | PerCubicCentimeter => Dimension::NumberDensity,
            Gauss | Milligauss => Dimension::MagneticField,
            Hertz | Kilohertz => Dimension::Frequency,
        }
    }

    /// Size of one unit in the dimension's reference unit, as `numerator / denominator`.
    fn ratio(self) -> (u64, u64) {
        use Unit::*;
        match self {
            Meter | KilogramPerCubicMeter | PerCubicMeter | Gauss | Hertz => (1, 1),
            Centimeter => (1, 100),
            Millimeter => (1, 1_000),
            Micrometer => (1, 1_000_000),
            Nanometer => (1, 1_000_000_000),
            GramPerCubicCentimeter => (1_000, 1),
            PerCubicCentimeter => (1_000_000, 1),
            Milligauss => (1, 1_000),
            Kilohertz => (1_000, 1),
        }
    }

    pub fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Meter => "m",
            Centimeter => "cm",
            Millimeter => "mm",
            Micrometer => "um",
            Nanometer => "nm",
            KilogramPerCubicMeter => "kg/m3",
            GramPerCubicCentimeter => "g/cm3",
            PerCubicMeter => "m-3",
            PerCubicCentimeter => "cm-3",
            Gauss => "G",
            Milligauss => "mG",
            Hertz => "Hz",
            Kilohertz => "kHz",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use Unit::*;
        // Case matters for mG vs MG; the rest are accepted as spelled.
        let unit = match s.trim() {
            "m" => Meter,
            "cm" => Centimeter,
            "mm" => Millimeter,
            "um" | "μm" | "µm" => Micrometer,
            "nm" => Nanometer,
            "kg/m3" | "kg/m^3" | "kg/m³" => KilogramPerCubicMeter,
            "g/cm3" | "g/cm^3" | "g/cm³" => GramPerCubicCentimeter,
            "m-3" | "m^-3" | "m⁻³" | "1/m3" => PerCubicMeter,
            "cm-3" | "cm^-3" | "cm⁻³" | "1/cm3" => PerCubicCentimeter,
            "G" => Gauss,
            "mG" => Milligauss,
            "Hz" => Hertz,
            "kHz" => Kilohertz,
            other => {
                return Err(Error::UnsupportedUnit { from: other.to_string(), to: String::new() })
            }
        };
        Ok(unit)
    }
}

/// Converts `value` from one unit to another of the same dimension.
///
/// The factor is applied as an integer ratio, so with an exact scalar type
/// (e.g. a rational) the round trip `u -> v -> u` is exact. With floats it is
/// correct to rounding.
pub fn convert_units<T>(value: T, from: Unit, to: Unit) -> Result<T>
where
    T: Num + FromPrimitive + Clone,
{
    if from.dimension() != to.dimension() {
        return Err(Error::UnsupportedUnit { from: from.to_string(), to: to.to_string() });
    }
    if from == to {
        return Ok(value);
    }
    let (fn_, fd) = from.ratio();
    let (tn, td) = to.ratio();
    // value * (fn/fd) / (tn/td) = value * (fn*td) / (fd*tn)
    let (num, den) = reduce(fn_ * td, fd * tn);
    let lift = |n: u64| T::from_u64(n).expect("conversion factor representable");
    let mut out = value;
    if num != 1 {
        out = out * lift(num);
    }
    if den != 1 {
        out = out / lift(den);
    }
    Ok(out)
}

fn reduce(a: u64, b: u64) -> (u64, u64) {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    (a / x, b / x)
}

/// Parses both unit symbols and converts.
pub fn convert_named<T>(value: T, from: &str, to: &str) -> Result<T>
where
    T: Num + FromPrimitive + Clone,
{
    let unsupported = || Error::UnsupportedUnit { from: from.to_string(), to: to.to_string() };
    let f: Unit = from.parse().map_err(|_| unsupported())?;
    let t: Unit = to.parse().map_err(|_| unsupported())?;
    convert_units(value, f, t).map_err(|_| unsupported())
}
