//! `bayes-forecast`: worst-case objectives averaged over posterior or
//! bootstrap draws of the history distribution.

use clap::ValueEnum;
use robust_forecast::bayes::{
    bayes_classification, bayes_minimax_binary, bayes_minimax_quadratic, bayes_mmr_binary,
    bayes_mmr_log, bayes_mmr_quadratic, bounds_sample, draw_posterior, mean_bounds, BoundsSample,
    PosteriorSource,
};
use robust_forecast::linear_model::extreme_probs_binary;
use robust_forecast::panel::{build_panel_spec, format_history, HistoryDistribution};
use robust_forecast::{BinaryBounds, Criterion, LossSpec, MultinomialBounds};
use serde::Serialize;

use super::{DecisionOut, PanelArgs};
use crate::model::parse_list;
use crate::output::{p6, Sink};
use crate::{CliError, Common};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Dirichlet(1 + counts) posterior.
    DirichletFlat,
    /// Dirichlet(alpha + counts) posterior; needs --alpha.
    DirichletCustom,
    /// Multinomial resamples of the observed counts.
    Bootstrap,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub panel: PanelArgs,
    /// Sample size simulated from the built-in design.
    #[arg(long)]
    pub simulate_n: Option<usize>,
    /// Number of draws.
    #[arg(long = "S", default_value_t = 200)]
    pub s: usize,
    #[arg(long, value_enum, default_value_t = Source::DirichletFlat)]
    pub source: Source,
    /// Comma-separated Dirichlet prior, one entry per history.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub a01: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a10: f64,
}

#[derive(Debug, Serialize)]
struct Rules {
    binary_minimax: DecisionOut,
    binary_minimax_regret: DecisionOut,
    quadratic_minimax: DecisionOut,
    quadratic_minimax_regret: DecisionOut,
    /// Log-loss minimax coincides with the quadratic rule.
    log_minimax: DecisionOut,
    log_minimax_regret: DecisionOut,
    classification_minimax: DecisionOut,
    classification_minimax_regret: DecisionOut,
}

#[derive(Debug, Serialize)]
struct Output {
    history: String,
    num_observations: Option<u64>,
    draws: usize,
    skipped: usize,
    skipped_fraction: f64,
    mean_p_lower: f64,
    mean_p_upper: f64,
    rules: Rules,
}

fn source(args: &Args) -> Result<PosteriorSource, CliError> {
    match (args.source, &args.alpha) {
        (Source::DirichletCustom, Some(a)) => Ok(PosteriorSource::DirichletCustom(parse_list("alpha", a)?)),
        (Source::DirichletCustom, None) => Err(CliError::Input("--source dirichlet-custom needs --alpha".into())),
        (_, Some(_)) => Err(CliError::Input("--alpha only applies to --source dirichlet-custom".into())),
        (Source::DirichletFlat, None) => Ok(PosteriorSource::DirichletFlat),
        (Source::Bootstrap, None) => Ok(PosteriorSource::Bootstrap),
    }
}

pub fn run(common: &Common, args: Args) -> Result<(), CliError> {
    let sink = Sink::new(&common.out_dir)?;
    if args.panel.dgp.is_some() && args.simulate_n.is_none() {
        return Err(CliError::Input("--dgp needs --simulate-n: draws require observed counts".into()));
    }
    let input = args.panel.resolve(args.simulate_n.map(|n| (n, common.seed)))?;
    let [history] = input.histories.as_slice() else {
        return Err(CliError::Input("bayes-forecast needs a single conditioning history (--history)".into()));
    };
    if input.data.prob(history) <= 0.0 {
        return Err(CliError::Input(format!("history {} was never observed", format_history(history))));
    }
    let m = input.model.model(history.clone())?;
    let draws = draw_posterior(&input.data, args.s, common.seed, source(&args)?)?;
    let refine = !args.panel.no_refine;
    let t = input.data.t;
    let bs: BoundsSample<BinaryBounds> = bounds_sample(&draws, |p| {
        let data = HistoryDistribution::new(t, p.to_vec())
            .or_else(|_| renormalized(t, p))?;
        // A draw may put no mass on the conditioning history; its set is
        // then treated as empty.
        if data.prob(&m.history) <= 0.0 {
            return Err(robust_forecast::Error::EmptyIdentifiedSet);
        }
        extreme_probs_binary(&build_panel_spec(&m, &data, input.beta.clone())?.with_refinement(refine))
    })?;

    let loss = LossSpec::binary(args.a01, args.a10)?;
    let multi = BoundsSample {
        bounds: bs.bounds.iter().map(MultinomialBounds::from_binary).collect(),
        skipped: bs.skipped,
        total: bs.total,
    };
    let (lo, hi) = mean_bounds(&bs)?;
    let quad_mm = bayes_minimax_quadratic(&bs)?;
    let rules = Rules {
        binary_minimax: bayes_minimax_binary(&loss, &bs)?.into(),
        binary_minimax_regret: bayes_mmr_binary(&loss, &bs)?.into(),
        quadratic_minimax: (&quad_mm).into(),
        quadratic_minimax_regret: bayes_mmr_quadratic(&bs)?.into(),
        log_minimax: quad_mm.into(),
        log_minimax_regret: bayes_mmr_log(&bs)?.into(),
        classification_minimax: bayes_classification(&multi, Criterion::Risk)?.into(),
        classification_minimax_regret: bayes_classification(&multi, Criterion::Regret)?.into(),
    };
    let mut warnings = input.warnings;
    warnings.extend(bs.warning());
    let out = Output {
        history: format_history(history),
        num_observations: input.data.num_observations(),
        draws: bs.total,
        skipped: bs.skipped,
        skipped_fraction: p6(bs.skipped as f64 / bs.total as f64),
        mean_p_lower: p6(lo),
        mean_p_upper: p6(hi),
        rules,
    };
    sink.report("bayes_forecast.json", "bayes-forecast", &args, common.seed, warnings, out)
}

/// Dirichlet draws sum to one only up to rounding.
fn renormalized(t: usize, p: &[f64]) -> robust_forecast::Result<HistoryDistribution> {
    let total: f64 = p.iter().sum();
    HistoryDistribution::new(t, p.iter().map(|x| x / total).collect())
}
