//! `limit-experiment`: excess risk and regret curves of the threshold rules
//! in the shifted-normal experiment, with optional Monte Carlo checks.

use std::collections::BTreeMap;

use robust_forecast::limit::{
    ex7_excess_regret_curve, ex7_excess_risk_curve, ex7_monte_carlo, excess, Ex7Config, Ex7Curves,
    Ex7Rule, RatioRow,
};
use robust_forecast::Criterion;
use serde::Serialize;

use crate::output::{p6, Sink};
use crate::{CliError, Common};

/// Local parameters at which simulated and analytic curves are compared.
pub const MC_POINTS: [f64; 7] = [-3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0];

fn parse_rule(s: &str) -> Result<Ex7Rule, String> {
    Ex7Rule::parse(s.trim()).map_err(|e| e.to_string())
}

/// Accepts `100000` as well as `1e5`.
fn parse_reps(s: &str) -> Result<usize, String> {
    let x: f64 = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if x >= 1.0 && x.fract() == 0.0 && x <= 1e12 {
        Ok(x as usize)
    } else {
        Err(format!("{s:?} is not a positive whole number"))
    }
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Curves run over [-h0_max, h0_max].
    #[arg(long, default_value_t = 8.0)]
    pub h0_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Comma-separated rules: bayes_mm, plugin, bayes_mmr, posterior_mean_plugin.
    #[arg(long, value_delimiter = ',', value_parser = parse_rule,
          default_value = "bayes_mm,plugin,bayes_mmr,posterior_mean_plugin")]
    pub rules: Vec<Ex7Rule>,
    /// Monte Carlo replications per check point, e.g. 1e5.
    #[arg(long, value_parser = parse_reps)]
    pub mc_check: Option<usize>,
    /// Bisection tolerance of the rule thresholds.
    #[arg(long, default_value_t = 1e-12)]
    pub root_tol: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    threshold: f64,
    integrated: f64,
    max: f64,
    argmax: f64,
}

#[derive(Debug, Serialize)]
struct McRow {
    rule: Ex7Rule,
    criterion: Criterion,
    h0: f64,
    analytic: f64,
    monte_carlo: f64,
    std_error: f64,
    /// (monte_carlo - analytic) / std_error; zero when both vanish.
    z: f64,
    within_3se: bool,
}

#[derive(Debug, Serialize)]
struct Output {
    grid_points: usize,
    risk: BTreeMap<&'static str, Summary>,
    regret: BTreeMap<&'static str, Summary>,
    /// Percentage by which `rule` exceeds `baseline`.
    ratios: Vec<RatioRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    mc_check: Vec<McRow>,
}

fn summaries(c: &Ex7Curves) -> BTreeMap<&'static str, Summary> {
    c.curves
        .iter()
        .map(|r| {
            let s = Summary { threshold: p6(r.threshold), integrated: p6(r.integrated), max: p6(r.max), argmax: p6(r.argmax) };
            (r.rule.name(), s)
        })
        .collect()
}

fn write_curves(sink: &Sink, name: &str, c: &Ex7Curves) -> Result<(), CliError> {
    let header: Vec<String> =
        std::iter::once("h0".to_string()).chain(c.curves.iter().map(|r| r.rule.name().to_string())).collect();
    let rows: Vec<Vec<f64>> = c
        .h0
        .iter()
        .enumerate()
        .map(|(i, h)| std::iter::once(*h).chain(c.curves.iter().map(|r| r.values[i])).collect())
        .collect();
    sink.csv(name, &header, &rows)
}

fn mc_rows(curves: &[&Ex7Curves], reps: usize, seed: u64) -> Result<Vec<McRow>, CliError> {
    let mut rows = Vec::new();
    let mut k = 0u64;
    for c in curves {
        for r in &c.curves {
            for h0 in MC_POINTS {
                let mc = ex7_monte_carlo(r.rule, c.criterion, h0, reps, seed.wrapping_add(k))?;
                k += 1;
                let analytic = excess(c.criterion, r.threshold, h0);
                let diff = mc.mean - analytic;
                let z = if mc.std_error > 0.0 { diff / mc.std_error } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
                rows.push(McRow {
                    rule: r.rule,
                    criterion: c.criterion,
                    h0,
                    analytic: p6(analytic),
                    monte_carlo: p6(mc.mean),
                    std_error: p6(mc.std_error),
                    z: (z * 100.0).round() / 100.0,
                    within_3se: z.abs() <= 3.0,
                });
            }
        }
    }
    Ok(rows)
}

pub fn run(common: &Common, mut args: Args) -> Result<(), CliError> {
    let sink = Sink::new(&common.out_dir)?;
    let mut seen = Vec::new();
    args.rules.retain(|r| if seen.contains(r) { false } else { seen.push(*r); true });
    let cfg = Ex7Config { h0_max: args.h0_max, step: args.step, root_tol: args.root_tol, rules: args.rules.clone() };
    let risk = ex7_excess_risk_curve(&cfg)?;
    let regret = ex7_excess_regret_curve(&cfg)?;
    write_curves(&sink, "risk_curves.csv", &risk)?;
    write_curves(&sink, "regret_curves.csv", &regret)?;
    let round = |mut r: RatioRow| {
        r.integrated_pct = p6(r.integrated_pct);
        r.max_pct = p6(r.max_pct);
        r
    };
    let ratios = risk.ratio_table().into_iter().chain(regret.ratio_table()).map(round).collect();
    let mc_check = match args.mc_check {
        Some(reps) => mc_rows(&[&risk, &regret], reps, common.seed)?,
        None => Vec::new(),
    };
    let warnings = mc_check
        .iter()
        .filter(|r| !r.within_3se)
        .map(|r| format!("{} {:?} at h0 = {}: Monte Carlo is {} standard errors off", r.rule.name(), r.criterion, r.h0, r.z))
        .collect();
    let out = Output { grid_points: risk.h0.len(), risk: summaries(&risk), regret: summaries(&regret), ratios, mc_check };
    sink.report("limit_experiment.json", "limit-experiment", &args, common.seed, warnings, out)
}
