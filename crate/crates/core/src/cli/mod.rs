//! Config-driven experiment runner.
//!
//! Exit codes: 0 on success, 2 for invalid input (bad flags, unreadable or
//! invalid config, unknown model), 3 for failures while running.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{ConditionsConfig, ExperimentConfig, RunConfig};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => EXIT_VALIDATION,
            Self::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Argument(_) | Error::Configuration(_) | Error::UnsupportedModel(_) => {
                Self::Validation(e.to_string())
            }
            Error::BoundaryInconsistency { .. } | Error::Consistency(_) | Error::Io(_) => Self::Runtime(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gendiff", version, about = "Random-bit chain approximation of general diffusions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Overrides `run.out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a_h(y) and the residual G(y, a_h(y)) − h.
    Scale {
        /// File with a [model] table; defaults to the config file.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        h: f64,
        /// `start:end:count`, endpoints included.
        #[arg(long, allow_hyphen_values = true)]
        y_grid: Option<String>,
    },
    /// Simulate X^h_T for every h in the config.
    Simulate,
    /// Empirical W_p against a reference law for every h, plus a log-log fit.
    RateStudy,
    /// Exit-time embedding statistics (Brownian models only).
    EmbedStudy,
    /// Grid audits of Condition (C) and Condition (Aλ).
    CheckConditions,
    /// Print the model registry.
    ListModels,
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
