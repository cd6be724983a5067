//! Command-line front end for the `raman-memory` engines.
//!
//! Every subcommand reads one config file, writes CSV (or a small table) to
//! stdout or `--out`, and reports through its exit code:
//! 0 success, 1 failed physics check, 2 configuration error, 3 numerical
//! non-convergence.

pub mod commands;
pub mod config;
pub mod format;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<raman_memory::Error> for CliError {
    fn from(e: raman_memory::Error) -> Self {
        use raman_memory::Error as E;
        match e {
            E::Convergence { .. } | E::Numerical(_) => CliError::Numerical(e.to_string()),
            E::Domain(_) | E::Singular(_) | E::Config(_) => CliError::Config(e.to_string()),
        }
    }
}

/// Rendered output plus exit status (0 or 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub status: u8,
}

impl Outcome {
    pub fn ok(output: String) -> Self {
        Self { output, status: 0 }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ramem", version, about = "Raman quantum-memory mapping simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; defaults to `output.path` from the config, then stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Quadrature tolerance, overriding `tolerance.quadrature`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Efficiency versus optical depth for flat and Lorentzian inputs.
    Efficiency,
    /// Transmitted and atomic noise spectra at one optical depth.
    Spectrum,
    /// Collective-spin variance versus time under the configured drive.
    Transient,
    /// Grid oracle: variance trace, or a convergence table when refining.
    Simulate,
    /// Weak-coupling read-out coupling and EPR noise budget.
    Teleport,
    /// Experimental inequality chain for the SI parameter set.
    Feasibility,
    /// Cross-engine consistency checks.
    Verify,
}

/// Runs one subcommand against a parsed configuration.
pub fn execute(command: Command, cfg: &RunConfig, tol_override: Option<f64>) -> Result<Outcome, CliError> {
    let tol = match tol_override {
        Some(t) if !(t > 0.0 && t.is_finite()) => {
            return Err(CliError::Config(format!("--tol must be positive, got {t}")))
        }
        Some(t) => t,
        None => cfg.tolerance.quadrature,
    };
    match command {
        Command::Efficiency => commands::efficiency(cfg, tol),
        Command::Spectrum => commands::spectrum(cfg),
        Command::Transient => commands::transient(cfg, tol),
        Command::Simulate => commands::simulate(cfg, tol),
        Command::Teleport => commands::teleport(cfg),
        Command::Feasibility => commands::feasibility(cfg),
        Command::Verify => commands::verify(tol),
    }
}

/// Loads the config named on the command line (an absent path means defaults).
pub fn load_config(path: Option<&std::path::Path>) -> Result<RunConfig, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?,
        None => String::new(),
    };
    RunConfig::from_text(&text)
}
