//! JSON model specifications read by the subcommands.

use std::path::Path;

use robust_forecast::divergence::{Expectation, PanelKlModel, Reference};
use robust_forecast::linear_model::uniform_grid;
use robust_forecast::panel::{ForecastConditioning, Link, PanelModelSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Evenly spaced grid `{min, min + step, ..., max}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridRange {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        Ok(uniform_grid(self.min, self.max, self.step)?)
    }
}

pub const DEFAULT_BETA: GridRange = GridRange { min: -5.0, max: 5.0, step: 0.01 };

fn default_beta() -> GridRange {
    DEFAULT_BETA
}

/// Panel model file: `{"T", "lambda_grid", "link", "beta", "history", "conditioning"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelSpecFile {
    #[serde(rename = "T")]
    pub t: usize,
    pub lambda_grid: GridRange,
    #[serde(default)]
    pub link: Link,
    #[serde(default = "default_beta")]
    pub beta: GridRange,
    /// Conditioning history; every history with positive probability when
    /// absent.
    #[serde(default)]
    pub history: Option<Vec<u8>>,
    #[serde(default)]
    pub conditioning: ForecastConditioning,
}

impl PanelSpecFile {
    pub fn model(&self, history: Vec<u8>) -> Result<PanelModelSpec, CliError> {
        let m = PanelModelSpec {
            t: self.t,
            lambda_grid: self.lambda_grid.values()?,
            link: self.link,
            history,
            conditioning: self.conditioning,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Objective and moment family of a KL bounds run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KlFamily {
    /// `b(x) = F(index + x)` without moment restrictions.
    Index {
        #[serde(default)]
        link: Link,
        #[serde(default)]
        index: f64,
    },
    /// Panel model: moments are the history probabilities, `beta` the
    /// homogeneous parameter grid.
    Panel { model: PanelKlModel, beta: GridRange },
}

fn default_sample_size() -> usize {
    100_000
}

fn default_expectation() -> Expectation {
    Expectation::MonteCarlo
}

/// KL bounds file: reference, radius, expectation method and family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KlSpecFile {
    pub reference: Reference,
    pub delta: f64,
    #[serde(default = "default_expectation")]
    pub expectation: Expectation,
    #[serde(default = "default_sample_size")]
    pub sample_size: usize,
    pub family: KlFamily,
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Parses `"010"` or `"0,1,0"`.
pub fn parse_history(s: &str) -> Result<Vec<u8>, CliError> {
    let cells: Vec<String> = if s.contains(',') {
        s.split(',').map(|c| c.trim().to_string()).collect()
    } else {
        s.trim().chars().map(String::from).collect()
    };
    cells
        .iter()
        .map(|c| match c.as_str() {
            "0" => Ok(0),
            "1" => Ok(1),
            other => Err(CliError::Input(format!("history {s:?}: cell {other:?} is not 0 or 1"))),
        })
        .collect::<Result<Vec<u8>, _>>()
        .and_then(|h| if h.is_empty() { Err(CliError::Input("empty history".into())) } else { Ok(h) })
}

/// Parses a comma-separated list of reals.
pub fn parse_list(name: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| CliError::Input(format!("--{name}: {c:?}: {e}"))))
        .collect()
}
