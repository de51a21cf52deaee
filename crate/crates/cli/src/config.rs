//! Run configuration: defaults, an optional JSON file and command-line flags,
//! merged in that order of increasing precedence.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use shapeinv::superalgebra::partnerships_for_sectors;
use shapeinv::{Grid, ParamValue};

use crate::CliError;

pub const DEFAULT_GRID: (f64, f64, usize) = (-12.0, 12.0, 2401);
pub const DEFAULT_FAMILY: &str = "poschl_teller";
pub const DEFAULT_G: f64 = 3.0;
pub const DEFAULT_LEVELS: usize = 3;
pub const DEFAULT_PARTNERSHIPS: usize = 2;
pub const DEFAULT_PHYSICS_TOL: f64 = 1e-3;
pub const DEFAULT_STRUCTURAL_TOL: f64 = 1e-12;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Grid bounds as written in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn to_grid(self) -> Result<Grid, CliError> {
        Ok(Grid::new(self.x_min, self.x_max, self.n_points)?)
    }
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub family: Option<String>,
    pub g: Option<Vec<f64>>,
    pub grid: Option<GridSpec>,
    pub levels: Option<usize>,
    pub partnerships: Option<usize>,
    pub sectors: Option<usize>,
    pub eta1: Option<f64>,
    pub physics_tol: Option<f64>,
    pub structural_tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub broken_alignment: Option<f64>,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config file: {e}")))
}

pub fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parses `x_min,x_max,n`.
pub fn parse_grid_spec(text: &str) -> Result<Grid, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(CliError::Config(format!("grid must be x_min,x_max,n, got {text:?}")));
    };
    let number = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::Config(format!("grid bound {s:?} is not a number")))
    };
    let n = n
        .parse::<usize>()
        .map_err(|_| CliError::Config(format!("grid point count {n:?} is not a positive integer")))?;
    Ok(Grid::new(number(lo)?, number(hi)?, n)?)
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Superpotential family name.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Family parameter; repeat for multi-parameter families.
    #[arg(long = "g", global = true, allow_negative_numbers = true)]
    pub g: Vec<f64>,
    /// Number of levels.
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Number of partnerships N (2N sectors).
    #[arg(long, global = true)]
    pub partnerships: Option<usize>,
    /// Total sector count 2N; must be even.
    #[arg(long, global = true, conflicts_with = "partnerships")]
    pub sectors: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eta1: Option<f64>,
    /// Grid as x_min,x_max,n.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Physics tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (directory for `states`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the smooth test vectors.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Offset added to every η beyond the first.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub broken_alignment: Option<f64>,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: String,
    pub g: ParamValue,
    pub grid: Grid,
    /// Whether the grid came from a flag or the config file.
    pub grid_explicit: bool,
    pub levels: usize,
    pub partnerships: usize,
    pub eta1: f64,
    pub physics_tol: f64,
    pub structural_tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub broken_alignment: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let (lo, hi, n) = DEFAULT_GRID;
        Self {
            family: DEFAULT_FAMILY.to_string(),
            g: ParamValue::scalar(DEFAULT_G),
            grid: Grid::new(lo, hi, n).expect("default grid is valid"),
            grid_explicit: false,
            levels: DEFAULT_LEVELS,
            partnerships: DEFAULT_PARTNERSHIPS,
            eta1: 0.0,
            physics_tol: DEFAULT_PHYSICS_TOL,
            structural_tol: DEFAULT_STRUCTURAL_TOL,
            format: Format::Json,
            out: None,
            seed: DEFAULT_SEED,
            broken_alignment: None,
        }
    }
}

impl RunConfig {
    /// Merges flags over `file` over defaults and validates the result.
    pub fn resolve(flags: &Flags, file: &ConfigFile) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(family) = flags.family.clone().or_else(|| file.family.clone()) {
            cfg.family = family;
        }
        let g = if !flags.g.is_empty() {
            Some(flags.g.clone())
        } else {
            file.g.clone()
        };
        if let Some(g) = g {
            if g.is_empty() {
                return Err(CliError::Config("g must contain at least one value".into()));
            }
            cfg.g = ParamValue::new(g)?;
        }
        if let Some(text) = &flags.grid {
            cfg.grid = parse_grid_spec(text)?;
            cfg.grid_explicit = true;
        } else if let Some(spec) = file.grid {
            cfg.grid = spec.to_grid()?;
            cfg.grid_explicit = true;
        }
        if let Some(levels) = flags.levels.or(file.levels) {
            cfg.levels = levels;
        }
        cfg.partnerships = match (flags.partnerships, flags.sectors) {
            (Some(n), _) => n,
            (None, Some(s)) => partnerships_for_sectors(s)?,
            (None, None) => match (file.partnerships, file.sectors) {
                (Some(n), Some(s)) if 2 * n != s => {
                    return Err(CliError::Config(format!(
                        "config sets partnerships = {n} and sectors = {s}, which disagree"
                    )))
                }
                (Some(n), _) => n,
                (None, Some(s)) => partnerships_for_sectors(s)?,
                (None, None) => DEFAULT_PARTNERSHIPS,
            },
        };
        if let Some(eta1) = flags.eta1.or(file.eta1) {
            cfg.eta1 = eta1;
        }
        if let Some(tol) = flags.tol.or(file.physics_tol) {
            cfg.physics_tol = tol;
        }
        if let Some(tol) = file.structural_tol {
            cfg.structural_tol = tol;
        }
        if let Some(format) = flags.format.or(file.format) {
            cfg.format = format;
        }
        cfg.out = flags.out.clone().or_else(|| file.out.clone());
        if let Some(seed) = flags.seed.or(file.seed) {
            cfg.seed = seed;
        }
        cfg.broken_alignment = flags.broken_alignment.or(file.broken_alignment);
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.levels == 0 {
            return Err(CliError::Config("levels must be at least 1".into()));
        }
        if self.partnerships == 0 {
            return Err(CliError::Config("partnerships must be at least 1".into()));
        }
        if !self.eta1.is_finite() {
            return Err(CliError::Config(format!("eta1 must be finite, got {}", self.eta1)));
        }
        for (name, tol) in [("physics_tol", self.physics_tol), ("structural_tol", self.structural_tol)] {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Config(format!("{name} must be positive and finite, got {tol}")));
            }
        }
        if let Some(offset) = self.broken_alignment {
            if !offset.is_finite() {
                return Err(CliError::Config(format!("broken-alignment offset must be finite, got {offset}")));
            }
        }
        Ok(())
    }
}
