//! Run configuration: a flat JSON file, command-line overrides, the
//! `GRAVAB_G_EARTH` environment variable and fallback to the published baseline.

use std::fmt;
use std::path::{Path, PathBuf};

use gravab_core::budget::BudgetParams;
use gravab_core::constants::{convert_units, Unit, DEFAULT_G_EARTH};
use gravab_core::geomopt::optimize_geometry;
use gravab_core::phases::{CloudParams, LatticeParams, MagneticParams, QUADRATIC_ZEEMAN_HZ_PER_G2};
use gravab_core::{AtomSpecies, Error, PhysicalConstants, Result};
use serde::{Deserialize, Serialize};

pub const G_EARTH_ENV: &str = "GRAVAB_G_EARTH";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GeometryMode {
    /// Two spheres of radius R, centres L apart.
    #[default]
    Pair,
    /// Choose L and R for the given s and ρ.
    Optimize,
    /// One sphere of radius R at the origin.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "table" | "aligned-table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// The config file as written. Keys carry their unit.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub species: Option<String>,
    #[serde(rename = "T_s")]
    pub hold_time_s: Option<f64>,
    pub geometry: Option<GeometryMode>,
    pub separation_cm: Option<f64>,
    pub radius_cm: Option<f64>,
    pub density_g_cm3: Option<f64>,
    pub s_cm: Option<f64>,
    pub lattice_depth_khz: Option<f64>,
    pub wavelength_nm: Option<f64>,
    pub waist_mm: Option<f64>,
    pub waist_offset_mm: Option<f64>,
    pub density_cm3: Option<f64>,
    pub density_asymmetry: Option<f64>,
    pub scattering_length_bohr: Option<f64>,
    pub delta_b_mg: Option<f64>,
    pub zeeman_hz_per_g2: Option<f64>,
    pub radial_trap_hz: Option<f64>,
    pub transport_s: Option<f64>,
    pub shake_amplitude_um: Option<f64>,
    pub shake_frequency_khz: Option<f64>,
    pub g_earth: Option<f64>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    pub strict: Option<bool>,
    pub timestamp: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad config: {e}")))
    }
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub species: Option<String>,
    pub hold_time: Option<f64>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    pub paper_baseline: bool,
    pub strict: bool,
    pub timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Config,
    Flag,
    Environment,
    PaperBaseline,
    /// Not given anywhere; the baseline value was used.
    Fallback,
    Derived,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Config => "config",
            Source::Flag => "flag",
            Source::Environment => "environment",
            Source::PaperBaseline => "paper-baseline",
            Source::Fallback => "fallback",
            Source::Derived => "derived",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub key: &'static str,
    pub source: Source,
}

/// Shaking of arm B used by `sequence --shake`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShakeSettings {
    /// [m]
    pub amplitude: f64,
    /// [rad/s]
    pub angular_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: BudgetParams,
    pub geometry: GeometryMode,
    /// Duration of each transport ramp [s].
    pub transport: f64,
    pub shake: ShakeSettings,
    #[serde(skip)]
    pub format: OutputFormat,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub timestamp: bool,
    pub provenance: Vec<Provenance>,
}

impl RunConfig {
    pub fn fallbacks(&self) -> Vec<&'static str> {
        self.provenance.iter().filter(|p| p.source == Source::Fallback).map(|p| p.key).collect()
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.params.constants
    }
}

/// Baseline values in the units of the config keys.
mod baseline {
    pub const SPECIES: &str = "Cs";
    pub const HOLD_TIME_S: f64 = 1.0;
    pub const SEPARATION_CM: f64 = 3.0;
    pub const RADIUS_CM: f64 = 1.0;
    pub const DENSITY_G_CM3: f64 = 10.0;
    pub const S_CM: f64 = 1.38;
    pub const LATTICE_DEPTH_KHZ: f64 = 100.0;
    pub const WAVELENGTH_NM: f64 = 852.0;
    pub const WAIST_MM: f64 = 0.5;
    pub const WAIST_OFFSET_MM: f64 = 1.0;
    pub const DENSITY_CM3: f64 = 2e9;
    pub const DENSITY_ASYMMETRY: f64 = 0.016;
    pub const DELTA_B_MG: f64 = 1.0;
    pub const RADIAL_TRAP_HZ: f64 = 0.1;
    pub const TRANSPORT_S: f64 = 0.1;
    pub const SHAKE_AMPLITUDE_UM: f64 = 0.1;
    pub const SHAKE_FREQUENCY_KHZ: f64 = 1.0;
}

struct Resolver {
    base_source: Source,
    strict: bool,
    provenance: Vec<Provenance>,
    missing: Vec<&'static str>,
}

impl Resolver {
    fn pick<V>(&mut self, key: &'static str, flag: Option<V>, file: Option<V>, base: V) -> V {
        let (value, source) = match (flag, file) {
            (Some(v), _) => (v, Source::Flag),
            (None, Some(v)) => (v, Source::Config),
            (None, None) => {
                if self.strict && self.base_source == Source::Fallback {
                    self.missing.push(key);
                }
                (base, self.base_source)
            }
        };
        self.provenance.push(Provenance { key, source });
        value
    }

    fn num(&mut self, key: &'static str, file: Option<f64>, base: f64) -> f64 {
        self.pick(key, None, file, base)
    }
}

fn convert(value: f64, from: Unit, to: Unit) -> Result<f64> {
    convert_units(value, from, to)
}

/// Reads `GRAVAB_G_EARTH` if set.
pub fn g_earth_from_env() -> Result<Option<f64>> {
    match std::env::var(G_EARTH_ENV) {
        Ok(text) => text
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::InvalidInput(format!("{G_EARTH_ENV}={text:?} is not a number"))),
        Err(_) => Ok(None),
    }
}

/// Builds the run configuration. `env_g` is the value of `GRAVAB_G_EARTH`.
pub fn resolve(file: &FileConfig, flags: &Overrides, env_g: Option<f64>) -> Result<RunConfig> {
    let strict = flags.strict || file.strict.unwrap_or(false);
    let mut r = Resolver {
        base_source: if flags.paper_baseline { Source::PaperBaseline } else { Source::Fallback },
        strict,
        provenance: Vec::new(),
        missing: Vec::new(),
    };

    let species_name = r.pick("species", flags.species.clone(), file.species.clone(), baseline::SPECIES.to_string());
    let hold_time = r.pick("T_s", flags.hold_time, file.hold_time_s, baseline::HOLD_TIME_S);
    let geometry = file.geometry.unwrap_or_default();
    let separation_cm = r.num("separation_cm", file.separation_cm, baseline::SEPARATION_CM);
    let radius_cm = r.num("radius_cm", file.radius_cm, baseline::RADIUS_CM);
    let density_g_cm3 = r.num("density_g_cm3", file.density_g_cm3, baseline::DENSITY_G_CM3);
    let s_cm = r.num("s_cm", file.s_cm, baseline::S_CM);
    let depth_khz = r.num("lattice_depth_khz", file.lattice_depth_khz, baseline::LATTICE_DEPTH_KHZ);
    let wavelength_nm = r.num("wavelength_nm", file.wavelength_nm, baseline::WAVELENGTH_NM);
    let waist_mm = r.num("waist_mm", file.waist_mm, baseline::WAIST_MM);
    let offset_mm = r.num("waist_offset_mm", file.waist_offset_mm, baseline::WAIST_OFFSET_MM);
    let n_cm3 = r.num("density_cm3", file.density_cm3, baseline::DENSITY_CM3);
    let asym = r.num("density_asymmetry", file.density_asymmetry, baseline::DENSITY_ASYMMETRY);
    let delta_b_mg = r.num("delta_b_mg", file.delta_b_mg, baseline::DELTA_B_MG);
    let radial_hz = r.num("radial_trap_hz", file.radial_trap_hz, baseline::RADIAL_TRAP_HZ);
    let transport = r.num("transport_s", file.transport_s, baseline::TRANSPORT_S);
    let shake_um = r.num("shake_amplitude_um", file.shake_amplitude_um, baseline::SHAKE_AMPLITUDE_UM);
    let shake_khz = r.num("shake_frequency_khz", file.shake_frequency_khz, baseline::SHAKE_FREQUENCY_KHZ);

    if !r.missing.is_empty() {
        return Err(Error::IncompleteBaseline(format!("strict mode: missing {}", r.missing.join(", "))));
    }

    // Optional keys with library defaults; they never count as missing.
    let zeeman = file.zeeman_hz_per_g2.unwrap_or(QUADRATIC_ZEEMAN_HZ_PER_G2);
    let (g_earth, g_source) = match (env_g, file.g_earth) {
        (Some(g), _) => (g, Source::Environment),
        (None, Some(g)) => (g, Source::Config),
        (None, None) => (DEFAULT_G_EARTH, r.base_source),
    };
    r.provenance.push(Provenance { key: "g_earth", source: g_source });

    let constants = PhysicalConstants::codata2018().with_g_earth(g_earth)?;
    let mut species = AtomSpecies::by_name(&species_name)?;
    if let Some(a) = file.scattering_length_bohr {
        species.scattering_length = a * constants.bohr_radius;
        r.provenance.push(Provenance { key: "scattering_length_bohr", source: Source::Config });
    }

    let density = convert(density_g_cm3, Unit::GramPerCubicCentimeter, Unit::KilogramPerCubicMeter)?;
    let s = convert(s_cm, Unit::Centimeter, Unit::Meter)?;
    let (mut separation, mut radius) =
        (convert(separation_cm, Unit::Centimeter, Unit::Meter)?, convert(radius_cm, Unit::Centimeter, Unit::Meter)?);
    if geometry == GeometryMode::Optimize {
        let opt = optimize_geometry(s, density, constants)?;
        separation = opt.separation;
        radius = opt.radius;
        for p in r.provenance.iter_mut().filter(|p| p.key == "separation_cm" || p.key == "radius_cm") {
            p.source = Source::Derived;
        }
    }

    let lattice = LatticeParams::from_depth_hz(
        convert(depth_khz, Unit::Kilohertz, Unit::Hertz)?,
        convert(wavelength_nm, Unit::Nanometer, Unit::Meter)?,
        convert(waist_mm, Unit::Millimeter, Unit::Meter)?,
        convert(offset_mm, Unit::Millimeter, Unit::Meter)?,
        &constants,
    )?;
    let cloud = CloudParams::new(convert(n_cm3, Unit::PerCubicCentimeter, Unit::PerCubicMeter)?, asym)?;
    let magnetic = MagneticParams::new(convert(delta_b_mg, Unit::Milligauss, Unit::Gauss)?, zeeman)?;
    let tau = std::f64::consts::TAU;
    let radial_trap_frequency = tau * radial_hz;
    if radial_trap_frequency.is_nan() || radial_trap_frequency <= 0.0 {
        return Err(Error::InvalidInput(format!("radial_trap_hz must be positive, got {radial_hz}")));
    }
    let shake = ShakeSettings {
        amplitude: convert(shake_um, Unit::Micrometer, Unit::Meter)?,
        angular_frequency: tau * convert(shake_khz, Unit::Kilohertz, Unit::Hertz)?,
    };

    let format_text = flags.format.clone().or_else(|| file.format.clone());
    let format = match format_text {
        Some(f) => f.parse()?,
        None => OutputFormat::Table,
    };

    let params = BudgetParams {
        separation,
        radius,
        density,
        s,
        species,
        hold_time,
        lattice,
        cloud,
        magnetic,
        radial_trap_frequency,
        constants,
    };
    Ok(RunConfig {
        params,
        geometry,
        transport,
        shake,
        format,
        output: flags.output.clone().or_else(|| file.output.clone()),
        timestamp: flags.timestamp || file.timestamp.unwrap_or(false),
        provenance: r.provenance,
    })
}
