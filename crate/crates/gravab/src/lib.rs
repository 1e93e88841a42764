//! Command-line front end: config ingestion, subcommands and data export.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
