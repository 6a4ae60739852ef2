//! `forecast`: oracle, minimax and minimax-regret decisions from bounds
//! supplied on the command line.

use clap::ValueEnum;
use robust_forecast::decision::{
    bernoulli_kl, minimax_binary, minimax_classification, minimax_log, minimax_quadratic,
    minimax_regret_binary, mmr_classification, mmr_log, mmr_quadratic, theta_optimal,
};
use robust_forecast::{BinaryBounds, Decision, ForecastProbability, LossSpec, MultinomialBounds};
use serde::Serialize;

use super::DecisionOut;
use crate::model::parse_list;
use crate::output::{p6, Sink};
use crate::{CliError, Common};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    Binary,
    Quadratic,
    Log,
    Classification,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(long, value_enum)]
    pub loss: Loss,
    /// Lower probability of outcome 1.
    #[arg(long)]
    pub pl: Option<f64>,
    /// Upper probability of outcome 1.
    #[arg(long)]
    pub pu: Option<f64>,
    /// Penalty for forecasting 1 when the outcome is 0.
    #[arg(long, default_value_t = 1.0)]
    pub a01: f64,
    /// Penalty for forecasting 0 when the outcome is 1.
    #[arg(long, default_value_t = 1.0)]
    pub a10: f64,
    /// Point forecast probability for the oracle rule: P(Y = 1), or the
    /// comma-separated outcome vector under classification loss.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Classification: lowest probability of each outcome.
    #[arg(long)]
    pub lower: Option<String>,
    /// Classification: worst-case regret of forecasting each outcome.
    #[arg(long)]
    pub gaps: Option<String>,
}

#[derive(Debug, Serialize)]
struct Rule {
    decision: DecisionOut,
    /// Expected loss for the oracle rule, worst-case risk or regret for the
    /// robust rules.
    value: f64,
}

#[derive(Debug, Serialize)]
struct Output {
    loss: Loss,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_optimal: Option<Rule>,
    minimax: Rule,
    minimax_regret: Rule,
}

fn rule(d: Decision, value: f64) -> Rule {
    Rule { decision: d.into(), value: p6(value) }
}

fn binary_bounds(args: &Args) -> Result<BinaryBounds, CliError> {
    match (args.pl, args.pu) {
        (Some(pl), Some(pu)) => Ok(BinaryBounds::new(pl, pu)?),
        _ => Err(CliError::Input(format!("--pl and --pu are required for {:?} loss", args.loss))),
    }
}

/// Point probability for the oracle rule; the common value when the
/// bounds coincide.
fn scalar_point(args: &Args, b: &BinaryBounds) -> Result<Option<f64>, CliError> {
    match &args.p {
        Some(s) => match parse_list("p", s)?.as_slice() {
            [p] if (0.0..=1.0).contains(p) => Ok(Some(*p)),
            _ => Err(CliError::Input(format!("--p must be a single probability, got {s:?}"))),
        },
        None => Ok((b.p_lower == b.p_upper).then_some(b.p_lower)),
    }
}

/// Expected loss of forecast `d` when P(Y = 1) = p.
fn expected_loss(loss: &LossSpec, args: &Args, d: f64, p: f64) -> f64 {
    match args.loss {
        Loss::Binary => {
            if d >= 0.5 {
                loss.a01 * (1.0 - p)
            } else {
                loss.a10 * p
            }
        }
        Loss::Quadratic => p * (1.0 - d).powi(2) + (1.0 - p) * d * d,
        Loss::Log => {
            let term = |w: f64, q: f64| if w == 0.0 { 0.0 } else { -w * q.ln() };
            term(p, d) + term(1.0 - p, 1.0 - d)
        }
        Loss::Classification => unreachable!("classification is handled separately"),
    }
}

fn run_scalar(args: &Args) -> Result<Output, CliError> {
    let b = binary_bounds(args)?;
    let loss = match args.loss {
        Loss::Binary => LossSpec::binary(args.a01, args.a10)?,
        Loss::Quadratic => LossSpec::quadratic(),
        _ => LossSpec::log(),
    };
    let theta = scalar_point(args, &b)?
        .map(|p| {
            let d = theta_optimal(&loss, ForecastProbability::Scalar(p))?;
            let v = expected_loss(&loss, args, d.value(), p);
            Ok::<_, CliError>(rule(d, v))
        })
        .transpose()?;
    // Expected loss is linear in p, so worst cases sit at the bounds.
    let worst = |d: f64| expected_loss(&loss, args, d, b.p_lower).max(expected_loss(&loss, args, d, b.p_upper));
    let (minimax, minimax_regret) = match args.loss {
        Loss::Binary => {
            let (mm, r) = minimax_binary(&loss, &b)?;
            let (mmr, g) = minimax_regret_binary(&loss, &b)?;
            (rule(mm, r.value), rule(mmr, g.value))
        }
        Loss::Quadratic => {
            let mm = minimax_quadratic(&b);
            let v = worst(mm.value());
            let (mmr, g) = mmr_quadratic(&b);
            (rule(mm, v), rule(mmr, g.value))
        }
        _ => {
            let mm = minimax_log(&b);
            let v = worst(mm.value());
            let mmr = mmr_log(&b);
            let d = mmr.value();
            let g = bernoulli_kl(b.p_lower, d).max(bernoulli_kl(b.p_upper, d));
            (rule(mm, v), rule(mmr, g))
        }
    };
    Ok(Output { loss: args.loss, theta_optimal: theta, minimax, minimax_regret })
}

fn run_classification(args: &Args) -> Result<Output, CliError> {
    let (Some(lower), Some(gaps)) = (&args.lower, &args.gaps) else {
        return Err(CliError::Input("--lower and --gaps are required for classification loss".into()));
    };
    let lower = parse_list("lower", lower)?;
    let gaps = parse_list("gaps", gaps)?;
    if lower.len() != gaps.len() {
        return Err(CliError::Input(format!(
            "--lower has {} entries but --gaps has {}",
            lower.len(),
            gaps.len()
        )));
    }
    let n = lower.len();
    let mb = MultinomialBounds::new(lower, gaps)?;
    let theta = args
        .p
        .as_deref()
        .map(|s| {
            let p = parse_list("p", s)?;
            let d = theta_optimal(&LossSpec::classification(n)?, ForecastProbability::Vector(&p))?;
            let v = 1.0 - p[d.discrete.unwrap_or(0)];
            Ok::<_, CliError>(rule(d, v))
        })
        .transpose()?;
    let (mm, r) = minimax_classification(&mb);
    let (mmr, g) = mmr_classification(&mb);
    Ok(Output {
        loss: args.loss,
        theta_optimal: theta,
        minimax: rule(mm, r.value),
        minimax_regret: rule(mmr, g.value),
    })
}

pub fn run(common: &Common, args: Args) -> Result<(), CliError> {
    let sink = Sink::new(&common.out_dir)?;
    let out = match args.loss {
        Loss::Classification => run_classification(&args)?,
        _ => run_scalar(&args)?,
    };
    sink.report("forecast.json", "forecast", &args, common.seed, Vec::new(), out)
}
