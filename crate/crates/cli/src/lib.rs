//! Command-line front end for `elgi-core`.
//!
//! Every command evaluates a grid of rotation angles and produces a
//! [`Table`], which is then rendered as CSV, JSON or an SVG plot.

pub mod commands;
pub mod config;
pub mod emit;
pub mod plot;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{Args, CommandKind, Format, RunConfig};
pub use emit::{format_number, Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] elgi_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("config file {path}: {msg}")]
    Config { path: PathBuf, msg: String },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Entropic Leggett-Garg simulations: joint probabilities, information
/// deficits, grand-distribution feasibility and finite-shot sampling.
#[derive(Debug, Parser)]
#[command(name = "elgi", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-time joint probabilities P(a, b) for a rotation of theta.
    Probabilities(Args),
    /// Information deficit with entropy terms, theta is the total rotation.
    Deficit(Args),
    /// Information deficit over a grid, optionally with sampled estimates.
    Sweep(Args),
    /// Three-time table with equal steps theta, and its pairwise marginals.
    Joint3(Args),
    /// Whether the equal-step marginals admit a grand distribution.
    Feasibility(Args),
    /// Finite-shot estimate of the three-time deficit.
    Sample(Args),
}

impl Command {
    pub fn split(self) -> (CommandKind, Args) {
        match self {
            Self::Probabilities(a) => (CommandKind::Probabilities, a),
            Self::Deficit(a) => (CommandKind::Deficit, a),
            Self::Sweep(a) => (CommandKind::Sweep, a),
            Self::Joint3(a) => (CommandKind::Joint3, a),
            Self::Feasibility(a) => (CommandKind::Feasibility, a),
            Self::Sample(a) => (CommandKind::Sample, a),
        }
    }
}

/// Resolves the configuration, runs the command and writes its output.
pub fn execute(cli: Cli) -> Result<()> {
    let (kind, args) = cli.command.split();
    let env_seed = std::env::var("ELGI_SEED").ok();
    let cfg = RunConfig::resolve(kind, &args, env_seed.as_deref())?;
    let rendered = render(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, rendered).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

/// Runs the configured command and renders it in the configured format.
pub fn render(cfg: &RunConfig) -> Result<String> {
    let report = commands::run(cfg)?;
    Ok(match cfg.format {
        Format::Csv => report.table.to_csv(),
        Format::Json => report.table.to_json(cfg),
        Format::Svg => report.plot.to_svg(),
    })
}
