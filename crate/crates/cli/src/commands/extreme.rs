//! `extreme-probs`: bounds on the one-step forecast of the panel model for
//! each conditioning history, the feasible beta interval and profile tables.

use std::collections::BTreeMap;

use robust_forecast::decision::{minimax_binary, minimax_regret_binary};
use robust_forecast::linear_model::{
    extreme_probs_binary_detailed, feasible_phi_interval, profile_bounds, Diagnostics,
};
use robust_forecast::panel::{build_panel_spec, format_history};
use robust_forecast::LossSpec;
use serde::Serialize;

use super::{DecisionOut, PanelArgs};
use crate::output::{p6, Sink};
use crate::{CliError, Common};

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub panel: PanelArgs,
}

#[derive(Debug, Serialize)]
struct Interval {
    lo: f64,
    hi: f64,
    empty: bool,
}

#[derive(Debug, Serialize)]
struct HistoryBounds {
    history: String,
    probability: f64,
    p_lower: f64,
    p_upper: f64,
    phi_lower: f64,
    phi_upper: f64,
    /// Robust decisions under symmetric binary loss.
    d_mm: DecisionOut,
    d_mmr: DecisionOut,
    /// Forecast functional under the data-generating process, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<f64>,
    profile_file: String,
    diagnostics: Diagnostics,
}

#[derive(Debug, Serialize)]
struct Output {
    #[serde(rename = "T")]
    t: usize,
    num_observations: Option<u64>,
    history_probs: BTreeMap<String, f64>,
    feasible_interval: Interval,
    histories: Vec<HistoryBounds>,
}

pub fn run(common: &Common, args: Args) -> Result<(), CliError> {
    let sink = Sink::new(&common.out_dir)?;
    let input = args.panel.resolve(None)?;
    let loss = LossSpec::symmetric();

    let mut feasible = None;
    let mut histories = Vec::new();
    for h in &input.histories {
        let m = input.model.model(h.clone())?;
        let spec = build_panel_spec(&m, &input.data, input.beta.clone())?.with_refinement(!args.panel.no_refine);
        if feasible.is_none() {
            // The moment conditions do not depend on the conditioning history.
            let f = feasible_phi_interval(&spec)?;
            feasible = Some(Interval { lo: p6(f.lo), hi: p6(f.hi), empty: f.empty });
        }
        let ext = extreme_probs_binary_detailed(&spec)?;
        let (d_mm, _) = minimax_binary(&loss, &ext.bounds)?;
        let (d_mmr, _) = minimax_regret_binary(&loss, &ext.bounds)?;
        let name = format_history(h);
        let profile_file = format!("profile_{name}.csv");
        let rows: Vec<Vec<f64>> = profile_bounds(&spec, 1)?.iter().map(|r| vec![r.phi, r.lo, r.hi]).collect();
        sink.csv(&profile_file, &["beta".into(), "p_lower".into(), "p_upper".into()], &rows)?;
        let truth = input.dgp.as_ref().map(|d| d.forecast_truth(&m)).transpose()?.map(p6);
        histories.push(HistoryBounds {
            probability: p6(input.data.prob(h)),
            history: name,
            p_lower: p6(ext.bounds.p_lower),
            p_upper: p6(ext.bounds.p_upper),
            phi_lower: p6(ext.phi_lower),
            phi_upper: p6(ext.phi_upper),
            d_mm: d_mm.into(),
            d_mmr: d_mmr.into(),
            truth,
            profile_file,
            diagnostics: ext.diagnostics,
        });
    }
    let feasible_interval = match feasible {
        Some(f) => f,
        None => return Err(CliError::Input("no conditioning history has positive probability".into())),
    };
    let history_probs = robust_forecast::panel::all_histories(input.data.t)
        .iter()
        .map(|h| (format_history(h), p6(input.data.prob(h))))
        .collect();
    let out = Output {
        t: input.data.t,
        num_observations: input.data.num_observations(),
        history_probs,
        feasible_interval,
        histories,
    };
    sink.report("extreme_probs.json", "extreme-probs", &args, common.seed, input.warnings, out)
}
