use std::path::PathBuf;

use clap::{Parser, Subcommand};
use gravab_core::constants::{convert_units, Unit};
use gravab_core::{Error, Result};

use crate::commands::{cmd_budget, cmd_field, cmd_optimize, cmd_saddles, cmd_sequence, FieldArgs, SequenceArgs};
use crate::config::{g_earth_from_env, resolve, FileConfig, Overrides};
use crate::output::render;

#[derive(Debug, Parser)]
#[command(name = "gravab", version, about = "Source-mass fields, force-free points, phase budgets and interferometer sequences")]
pub struct Cli {
    /// Flat JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// table, csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Start from the published baseline parameters.
    #[arg(long = "paper-baseline", global = true)]
    pub paper_baseline: bool,
    #[arg(long, global = true, value_name = "NAME")]
    pub species: Option<String>,
    /// Hold time T.
    #[arg(long = "T", global = true, value_name = "SECONDS", allow_negative_numbers = true)]
    pub hold_time: Option<f64>,
    /// Fail instead of falling back to baseline values.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Add a timestamp to the output metadata.
    #[arg(long, global = true)]
    pub timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Potential, gradient and curvature along the source axis.
    Field {
        #[arg(long = "x-min-cm", allow_negative_numbers = true)]
        x_min_cm: Option<f64>,
        #[arg(long = "x-max-cm", allow_negative_numbers = true)]
        x_max_cm: Option<f64>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Include Earth's field (x vertical).
        #[arg(long)]
        earth: bool,
    },
    /// Stationary points and arm positions.
    Saddles,
    /// Geometry with the largest potential difference for the configured s.
    Optimize,
    /// Signal and systematics budget.
    Budget,
    /// Interferometer timeline and proper-time phases.
    Sequence {
        /// Shake arm B during the hold.
        #[arg(long)]
        shake: bool,
        /// Keep the masses in place during transport.
        #[arg(long = "type-ii")]
        type_ii: bool,
        /// Insertion/removal ramp of the masses [s].
        #[arg(long = "mass-ramp", default_value_t = 0.0)]
        mass_ramp: f64,
        /// Comma-separated hold times for a T scan [s].
        #[arg(long, value_delimiter = ',')]
        scan: Vec<f64>,
    },
}

fn cm(x: Option<f64>) -> Result<Option<f64>> {
    x.map(|v| convert_units(v, Unit::Centimeter, Unit::Meter)).transpose()
}

/// Runs the command and returns the rendered text together with the output path, if any.
pub fn execute(cli: &Cli) -> Result<(String, Option<PathBuf>)> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        species: cli.species.clone(),
        hold_time: cli.hold_time,
        format: cli.format.clone(),
        output: cli.output.clone(),
        paper_baseline: cli.paper_baseline,
        strict: cli.strict,
        timestamp: cli.timestamp,
    };
    let run = resolve(&file, &flags, g_earth_from_env()?)?;
    let report = match &cli.command {
        Command::Field { x_min_cm, x_max_cm, samples, earth } => cmd_field(
            &run,
            &FieldArgs { x_min: cm(*x_min_cm)?, x_max: cm(*x_max_cm)?, samples: *samples, include_earth: *earth },
        )?,
        Command::Saddles => cmd_saddles(&run)?,
        Command::Optimize => cmd_optimize(&run)?,
        Command::Budget => cmd_budget(&run)?,
        Command::Sequence { shake, type_ii, mass_ramp, scan } => cmd_sequence(
            &run,
            &SequenceArgs { shake: *shake, type_ii: *type_ii, mass_ramp: *mass_ramp, scan: scan.clone() },
        )?,
    };
    Ok((render(&report, &run)?, run.output.clone()))
}

/// Writes the result of [`execute`] to its destination.
pub fn run(cli: &Cli) -> Result<()> {
    let (text, path) = execute(cli)?;
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// One-line machine-readable error for standard error.
pub fn error_line(err: &Error) -> String {
    serde_json::json!({ "error": { "code": err.code(), "message": err.to_string() } }).to_string()
}
