//! Reproducible tables for the `presence` binary.
//!
//! Each [`Command`] maps a [`RunConfig`] to a [`Table`] of named columns and a
//! summary record, rendered as CSV or JSON and written atomically.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use thiserror::Error;

mod commands;
mod table;

pub use commands::{
    run_chebyshev, run_decision, run_decohere, run_evolve, run_frequency, run_posterior,
};
pub use table::{write_atomic, Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid arguments: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] presence_core::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Core(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Presence density over relative frequency, Gaussian limit and histogram.
    Frequency,
    /// Exact tails against the Chebyshev bound over a sweep of N.
    Chebyshev,
    /// Grid posterior over P_u from an observed (or sampled) frequency.
    Posterior,
    /// Presence and weight distributions side by side, plus the betting choice.
    Decision,
    /// Presences of a driven two-level system over time.
    Evolve,
    /// Coherence of a qubit against the number of environment qubits.
    Decohere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyTable {
    /// One row per z = m/N.
    Density,
    /// One row per count m.
    Counts,
    /// One row per histogram bin.
    Bars,
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize)]
#[command(
    name = "presence",
    version,
    about = "Branch presence statistics as plot-ready tables"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Presence of the outcome u.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_u: Option<f64>,
    /// Decision weight given to u.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_u: Option<f64>,
    /// Number of repetitions N.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Bin width in z; defaults to 0.5/√N for `frequency`, 0.1 for `chebyshev`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_z: Option<f64>,
    /// Posterior grid spacing; must divide [0, 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    /// Seed for sampling a branch before inference.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long = "out")]
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Observed relative frequency for `posterior`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[arg(long, value_enum, default_value = "density")]
    pub table: FrequencyTable,
    /// Half-width of the mismatch windows in standard deviations.
    #[arg(long, default_value_t = 3.0)]
    pub window_sigmas: f64,
    /// Credible mass reported by `posterior`.
    #[arg(long, default_value_t = 0.95)]
    pub credible_mass: f64,
    /// Per-qubit overlap magnitude |g| for `decohere`.
    #[arg(long, default_value_t = 0.8)]
    pub g: f64,
    /// Phase of the overlap g, in radians.
    #[arg(long, default_value_t = 0.0)]
    pub g_phase: f64,
    /// Largest number of environment qubits for `decohere`.
    #[arg(long, default_value_t = 10)]
    pub env_qubits: usize,
    /// Off-diagonal coupling of the two-level Hamiltonian.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Energy of the second level.
    #[arg(long, default_value_t = 0.0)]
    pub detuning: f64,
    /// Final time for `evolve`.
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub t_max: f64,
    /// Number of time steps for `evolve`.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
}

pub fn run(config: &RunConfig) -> Result<Table, CliError> {
    match config.command {
        Command::Frequency => run_frequency(config),
        Command::Chebyshev => run_chebyshev(config),
        Command::Posterior => run_posterior(config),
        Command::Decision => run_decision(config),
        Command::Evolve => run_evolve(config),
        Command::Decohere => run_decohere(config),
    }
}

/// Computes, renders and writes one artifact; returns the rendered text.
pub fn execute(config: &RunConfig) -> Result<String, CliError> {
    let rendered = run(config)?.render(config.format, config)?;
    if let Some(path) = &config.output_path {
        write_atomic(path, &rendered)?;
    }
    Ok(rendered)
}
