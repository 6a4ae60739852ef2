//! Subcommands and the panel input they share.

pub mod bayes;
pub mod extreme;
pub mod forecast;
pub mod kl;
pub mod limit;

use std::path::PathBuf;

use clap::ValueEnum;
use robust_forecast::panel::{
    all_histories, format_history, honore_tamer_dgp_with, ingest_panel_csv, DgpSpec,
    ForecastConditioning, HistoryDistribution, LambdaWeights, Link,
};
use robust_forecast::Decision;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::model::{load_json, parse_history, GridRange, PanelSpecFile, DEFAULT_BETA};
use crate::output::p6;
use crate::CliError;

/// Parses a kebab-case enum value through its serde representation.
pub fn serde_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dgp {
    /// Probit design with beta0 = 0.2 and normal heterogeneity on -3:0.2:3.
    HonoreTamer,
}

/// Where the history distribution and the model come from.
#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct PanelArgs {
    /// Built-in design used instead of a data file.
    #[arg(long, value_enum, conflicts_with = "panel", required_unless_present = "panel")]
    pub dgp: Option<Dgp>,
    /// Panel CSV with header y1,...,yT and 0/1 cells.
    #[arg(long)]
    pub panel: Option<PathBuf>,
    /// Panel model JSON; the built-in probit layout when absent.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Number of periods of the built-in design.
    #[arg(long = "T", default_value_t = 2)]
    pub t: usize,
    /// Conditioning history, e.g. 00 or 0,1; overrides the spec file.
    #[arg(long)]
    pub history: Option<String>,
    /// Weights of the built-in design's heterogeneity grid.
    #[arg(long, value_parser = serde_enum::<LambdaWeights>, default_value = "normal-bins")]
    pub lambda_weights: LambdaWeights,
    /// Forecast functional: last-outcome or full-history.
    #[arg(long, value_parser = serde_enum::<ForecastConditioning>)]
    pub conditioning: Option<ForecastConditioning>,
    #[arg(long)]
    pub beta_min: Option<f64>,
    #[arg(long)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub beta_step: Option<f64>,
    /// Skip golden-section refinement of the best beta cell.
    #[arg(long)]
    pub no_refine: bool,
}

/// Resolved panel input.
pub struct PanelInput {
    pub data: HistoryDistribution,
    pub dgp: Option<DgpSpec>,
    pub model: PanelSpecFile,
    pub beta: Vec<f64>,
    pub histories: Vec<Vec<u8>>,
    pub warnings: Vec<String>,
}

impl PanelArgs {
    /// Model layout of the built-in design for `t` periods.
    fn default_model(t: usize) -> PanelSpecFile {
        PanelSpecFile {
            t,
            lambda_grid: GridRange { min: -3.0, max: 3.0, step: 0.2 },
            link: Link::Probit,
            beta: DEFAULT_BETA,
            history: None,
            conditioning: ForecastConditioning::LastOutcome,
        }
    }

    /// Loads the model, then the data (population or sample of size
    /// `simulate`), and picks the histories to condition on.
    pub fn resolve(&self, simulate: Option<(usize, u64)>) -> Result<PanelInput, CliError> {
        let mut model = match &self.spec {
            Some(path) => load_json::<PanelSpecFile>(path)?,
            None => Self::default_model(self.t),
        };
        let (data, dgp) = match (&self.panel, self.dgp) {
            (Some(path), _) => (ingest_panel_csv(path)?, None),
            (None, Some(Dgp::HonoreTamer)) => {
                let (dgp, population) = honore_tamer_dgp_with(model.t, self.lambda_weights)?;
                let data = match simulate {
                    Some((n, seed)) => {
                        let rows = dgp.simulate(model.t, n, seed)?;
                        robust_forecast::panel::tally_histories(model.t, &rows)?
                    }
                    None => population,
                };
                (data, Some(dgp))
            }
            (None, None) => return Err(CliError::Input("one of --dgp or --panel is required".into())),
        };
        if self.spec.is_none() {
            model.t = data.t;
        } else if model.t != data.t {
            return Err(CliError::Input(format!("model has T = {} but the data has T = {}", model.t, data.t)));
        }
        if let Some(c) = self.conditioning {
            model.conditioning = c;
        }
        if let Some(h) = &self.history {
            model.history = Some(parse_history(h)?);
        }
        let beta = GridRange {
            min: self.beta_min.unwrap_or(model.beta.min),
            max: self.beta_max.unwrap_or(model.beta.max),
            step: self.beta_step.unwrap_or(model.beta.step),
        };
        model.beta = beta;

        let mut warnings = Vec::new();
        let histories = match &model.history {
            Some(h) => vec![h.clone()],
            None => all_histories(data.t)
                .into_iter()
                .filter(|h| {
                    let keep = data.prob(h) > 0.0;
                    if !keep {
                        warnings.push(format!("history {} has probability zero and is skipped", format_history(h)));
                    }
                    keep
                })
                .collect(),
        };
        Ok(PanelInput { beta: beta.values()?, data, dgp, model, histories, warnings })
    }
}

/// A decision as printed in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionOut {
    pub value: f64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub tie: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tie_set: Vec<usize>,
}

impl From<&Decision> for DecisionOut {
    fn from(d: &Decision) -> Self {
        Self { value: p6(d.value()), tie: d.tie, tie_set: d.tie_set.clone() }
    }
}

impl From<Decision> for DecisionOut {
    fn from(d: Decision) -> Self {
        (&d).into()
    }
}
