//! Command-line front end for the `shapeinv` library.
//!
//! Exit codes: 0 on success, 1 for usage, configuration or domain errors,
//! 2 when a computed quantity misses its tolerance.

use std::ffi::OsString;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;

pub use config::{parse_config, parse_grid_spec, ConfigFile, Flags, Format, RunConfig};
pub use output::{reemit_json, round12};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] shapeinv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ToleranceFailure,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Success
        } else {
            Outcome::ToleranceFailure
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::ToleranceFailure => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "shapeinv", version, about = "Shape-invariant spectra and multi-sector superalgebra checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List the registered superpotential families.
    Catalog,
    /// Exact energies against the finite-difference oracle.
    Spectrum,
    /// Stationary states written one file per level.
    States,
    /// Build the 2N-sector model and check its algebra.
    Verify,
    /// Per-sector level lists and alignment flags for plotting.
    Figure,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Catalog => "catalog",
            Command::Spectrum => "spectrum",
            Command::States => "states",
            Command::Verify => "verify",
            Command::Figure => "figure",
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => outcome.exit_code(),
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let file = match &cli.flags.config {
        Some(path) => config::read_config(path)?,
        None => ConfigFile::default(),
    };
    let cfg = RunConfig::resolve(&cli.flags, &file)?;
    commands::dispatch(cli.command, &cfg)
}
