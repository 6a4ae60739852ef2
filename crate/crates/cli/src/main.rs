//! `robust-forecast`: bounds, robust decisions and limit-experiment curves
//! from the command line.
//!
//! Exit codes: 0 on success, 2 for input errors, 3 for numerical failures.
//! `ROBUST_FORECAST_THREADS` caps the worker pool.

mod commands;
mod model;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<robust_forecast::Error> for CliError {
    fn from(e: robust_forecast::Error) -> Self {
        if e.is_input() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "robust-forecast", version, about = "Robust forecasts for discrete outcomes under partial identification")]
struct Cli {
    /// Directory receiving report and curve files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Random seed; generated from the clock and reported when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extreme forecast probabilities for the dynamic panel model.
    ExtremeProbs(commands::extreme::Args),
    /// Oracle, minimax and minimax-regret decisions from given bounds.
    Forecast(commands::forecast::Args),
    /// Bayesian robust forecasts from posterior or bootstrap draws.
    BayesForecast(commands::bayes::Args),
    /// Excess risk and regret curves of the shifted-normal limit experiment.
    LimitExperiment(commands::limit::Args),
    /// Extreme probabilities over a KL neighbourhood of a reference.
    KlBounds(commands::kl::Args),
}

/// Settings shared by every subcommand, as echoed in reports.
#[derive(Debug, Clone, Serialize)]
pub struct Common {
    pub out_dir: PathBuf,
    pub seed: u64,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ROBUST_FORECAST_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Input(format!("ROBUST_FORECAST_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Numerical(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let seed = cli.seed.unwrap_or_else(|| {
        SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos() as u64)
    });
    let common = Common { out_dir: cli.out_dir, seed };
    match cli.command {
        Command::ExtremeProbs(a) => commands::extreme::run(&common, a),
        Command::Forecast(a) => commands::forecast::run(&common, a),
        Command::BayesForecast(a) => commands::bayes::run(&common, a),
        Command::LimitExperiment(a) => commands::limit::run(&common, a),
        Command::KlBounds(a) => commands::kl::run(&common, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
