//! `kl-bounds`: extreme forecast probabilities over a KL neighbourhood of a
//! reference distribution for the heterogeneity.

use std::path::PathBuf;
use std::sync::Arc;

use robust_forecast::decision::{minimax_binary, minimax_regret_binary};
use robust_forecast::divergence::{
    extreme_value, multinomial_regret_gap, panel_kl_spec, ContinuousSetSpec, KlBound,
};
use robust_forecast::{BinaryBounds, LossSpec};
use serde::Serialize;

use super::DecisionOut;
use crate::model::{load_json, KlFamily, KlSpecFile};
use crate::output::{p6, Sink};
use crate::{CliError, Common};

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// KL bounds JSON: reference, delta, expectation, sample_size, family.
    #[arg(long)]
    pub spec: PathBuf,
    /// Radius overriding the file's delta.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Extreme {
    value: f64,
    phi: f64,
    /// Monte Carlo standard error; zero for quadrature.
    std_error: f64,
    feasible_points: usize,
    eta: f64,
}

#[derive(Debug, Serialize)]
struct Output {
    file: KlSpecFile,
    upper: Extreme,
    lower: Extreme,
    /// Worst-case regret of forecasting outcome 0 and outcome 1.
    regret_gaps: [f64; 2],
    d_mm: DecisionOut,
    d_mmr: DecisionOut,
}

fn extreme(b: &KlBound) -> Extreme {
    Extreme {
        value: p6(b.value.clamp(0.0, 1.0)),
        phi: p6(b.phi),
        std_error: p6(b.std_error),
        feasible_points: b.feasible_points,
        eta: b.inner.eta,
    }
}

fn build(file: &KlSpecFile, delta: f64, seed: u64) -> Result<ContinuousSetSpec, CliError> {
    let mut spec = match &file.family {
        KlFamily::Index { link, index } => {
            let (link, index) = (*link, *index);
            ContinuousSetSpec::unrestricted(
                file.reference.clone(),
                Arc::new(move |x, _, m| {
                    let q = link.cdf(index + x);
                    if m == 1 {
                        q
                    } else {
                        1.0 - q
                    }
                }),
                delta,
            )
        }
        KlFamily::Panel { model, beta } => panel_kl_spec(model, file.reference.clone(), beta.values()?, delta)?,
    };
    spec.expectation = file.expectation;
    spec.sample_size = file.sample_size;
    spec.seed = seed;
    Ok(spec)
}

pub fn run(common: &Common, args: Args) -> Result<(), CliError> {
    let sink = Sink::new(&common.out_dir)?;
    let mut file: KlSpecFile = load_json(&args.spec)?;
    if let Some(d) = args.delta {
        file.delta = d;
    }
    let spec = build(&file, file.delta, common.seed)?;
    let b = spec.b.clone();
    let upper = extreme_value(&spec, |x, phi| b(x, phi, 1), true)?;
    let lower = extreme_value(&spec, |x, phi| b(x, phi, 1), false)?;
    let bounds = BinaryBounds::new(lower.value.clamp(0.0, 1.0), upper.value.clamp(0.0, 1.0).max(lower.value.clamp(0.0, 1.0)))?;
    let loss = LossSpec::symmetric();
    let (d_mm, _) = minimax_binary(&loss, &bounds)?;
    let (d_mmr, _) = minimax_regret_binary(&loss, &bounds)?;
    let regret_gaps = [p6(multinomial_regret_gap(&spec, 0)?), p6(multinomial_regret_gap(&spec, 1)?)];
    let out = Output {
        file,
        upper: extreme(&upper),
        lower: extreme(&lower),
        regret_gaps,
        d_mm: d_mm.into(),
        d_mmr: d_mmr.into(),
    };
    sink.report("kl_bounds.json", "kl-bounds", &args, common.seed, Vec::new(), out)
}
