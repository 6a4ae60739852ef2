//! Shifted-normal limit experiment for a binary forecast whose upper
//! probability has a kink at P = 1/2.
//!
//! With `p_L(P) = P` and `p_U(P) = 1/2` below 1/2 and `(2P - 1/2) ∧ 1`
//! above, the local parameter `h = sqrt(n)(P - 1/2)` has estimate
//! `ĥ ~ N(h0, 1)` and posterior `h | ĥ ~ N(ĥ, 1)`. Every rule here predicts
//! 1 on a half-line `[ĥ*, ∞)`, so its frequentist excess risk and regret
//! are closed-form in `Φ(ĥ* - h0)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{BinaryBounds, Criterion};
use crate::error::{Error, Result};
use crate::normal::{cdf, negative_part_mean, pdf, positive_part_mean};

/// Bracket searched for decision thresholds.
pub const ROOT_BRACKET: (f64, f64) = (-10.0, 10.0);

/// Extreme probabilities of the kinked example.
pub fn ex7_bounds(p: f64) -> Result<BinaryBounds> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInput(format!("P must lie in (0, 1), got {p}")));
    }
    let upper = if p < 0.5 { 0.5 } else { (2.0 * p - 0.5).min(1.0) };
    BinaryBounds::new(p, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ex7Rule {
    /// Bayesian robust forecast, risk criterion.
    BayesMm,
    /// Oracle rule at the point estimate.
    Plugin,
    /// Bayesian robust forecast, regret criterion.
    BayesMmr,
    /// Regret oracle evaluated at the posterior means of p_L and p_U.
    PosteriorMeanPlugin,
}

impl Ex7Rule {
    pub const ALL: [Ex7Rule; 4] =
        [Ex7Rule::BayesMm, Ex7Rule::Plugin, Ex7Rule::BayesMmr, Ex7Rule::PosteriorMeanPlugin];

    pub fn name(self) -> &'static str {
        match self {
            Ex7Rule::BayesMm => "bayes_mm",
            Ex7Rule::Plugin => "plugin",
            Ex7Rule::BayesMmr => "bayes_mmr",
            Ex7Rule::PosteriorMeanPlugin => "posterior_mean_plugin",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown rule {s:?}")))
    }

    /// Continuous score whose sign gives the decision: 1 when it is >= 0.
    pub fn margin(self, h_hat: f64) -> f64 {
        // Posterior means of h_+ and h_- under h | ĥ ~ N(ĥ, 1).
        let pos = positive_part_mean(h_hat);
        let neg = negative_part_mean(h_hat);
        match self {
            Ex7Rule::BayesMm => h_hat + 2.0 * pdf(h_hat) / (1.0 + 2.0 * cdf(h_hat)),
            Ex7Rule::Plugin => h_hat,
            Ex7Rule::BayesMmr => 2.0 * pos - neg,
            // (1/2 - E p_L)_+ <= (E p_U - 1/2)_+ in local units.
            Ex7Rule::PosteriorMeanPlugin => 2.0 * pos - (-h_hat).max(0.0),
        }
    }

    pub fn decide(self, h_hat: f64) -> u8 {
        u8::from(self.margin(h_hat) >= 0.0)
    }
}

/// Decisions of every rule at one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ex7Decisions {
    pub bayes_mm: u8,
    pub plugin: u8,
    pub bayes_mmr: u8,
    pub posterior_mean_plugin: u8,
}

pub fn ex7_rules(h_hat: f64) -> Result<Ex7Decisions> {
    if !h_hat.is_finite() {
        return Err(Error::InvalidInput(format!("estimate must be finite, got {h_hat}")));
    }
    Ok(Ex7Decisions {
        bayes_mm: Ex7Rule::BayesMm.decide(h_hat),
        plugin: Ex7Rule::Plugin.decide(h_hat),
        bayes_mmr: Ex7Rule::BayesMmr.decide(h_hat),
        posterior_mean_plugin: Ex7Rule::PosteriorMeanPlugin.decide(h_hat),
    })
}

/// Threshold `ĥ*` of a rule, after checking on a fine scan that its
/// acceptance region is a single half-line.
pub fn threshold(rule: Ex7Rule, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = ROOT_BRACKET;
    let steps = 20_000;
    let mut changes = 0;
    let mut prev = rule.decide(lo);
    for i in 1..=steps {
        let d = rule.decide(lo + (hi - lo) * i as f64 / steps as f64);
        if d != prev {
            changes += 1;
            if d < prev {
                changes += 1;
            }
        }
        prev = d;
    }
    if rule.decide(lo) != 0 || rule.decide(hi) != 1 || changes != 1 {
        return Err(Error::UnsupportedRule(format!(
            "{} does not predict 1 on a half-line within [{lo}, {hi}]",
            rule.name()
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if rule.decide(mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Frequentist excess of a threshold rule at `h0`.
pub fn excess(criterion: Criterion, threshold: f64, h0: f64) -> f64 {
    // P[d = 0 | h0] = Φ(ĥ* - h0), P[d = 1 | h0] = Φ(h0 - ĥ*).
    let (up, down) = match criterion {
        Criterion::Risk => (3.0, 1.0),
        Criterion::Regret => (4.0, 2.0),
    };
    if h0 >= 0.0 {
        up * h0 * cdf(threshold - h0)
    } else {
        -down * h0 * cdf(h0 - threshold)
    }
}

/// Excess at `h0` for a realized decision.
fn excess_given(criterion: Criterion, d: u8, h0: f64) -> f64 {
    let (up, down) = match criterion {
        Criterion::Risk => (3.0, 1.0),
        Criterion::Regret => (4.0, 2.0),
    };
    match (h0 >= 0.0, d) {
        (true, 0) => up * h0,
        (false, 1) => -down * h0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ex7Config {
    pub h0_max: f64,
    pub step: f64,
    pub root_tol: f64,
    pub rules: Vec<Ex7Rule>,
}

impl Default for Ex7Config {
    fn default() -> Self {
        Self { h0_max: 8.0, step: 0.01, root_tol: 1e-12, rules: Ex7Rule::ALL.to_vec() }
    }
}

impl Ex7Config {
    /// Grid from `-h0_max` to `h0_max`, symmetric about zero.
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.h0_max > 0.0) || !(self.step > 0.0) || !(self.root_tol > 0.0) {
            return Err(Error::InvalidInput(
                "h0_max, step and root tolerance must be positive".into(),
            ));
        }
        if self.rules.is_empty() {
            return Err(Error::InvalidInput("no rules selected".into()));
        }
        let half = (self.h0_max / self.step).round();
        if (half * self.step - self.h0_max).abs() > 1e-9 * self.h0_max {
            return Err(Error::InvalidInput(format!(
                "step {} does not divide h0_max {}",
                self.step, self.h0_max
            )));
        }
        // Built from integers so the grid is exactly symmetric and hits 0.
        let half = half as i64;
        Ok((-half..=half).map(|i| i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleCurve {
    pub rule: Ex7Rule,
    pub threshold: f64,
    pub values: Vec<f64>,
    /// Trapezoid integral over the grid.
    pub integrated: f64,
    pub max: f64,
    pub argmax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ex7Curves {
    pub criterion: Criterion,
    pub h0: Vec<f64>,
    pub curves: Vec<RuleCurve>,
}

impl Ex7Curves {
    pub fn get(&self, rule: Ex7Rule) -> Option<&RuleCurve> {
        self.curves.iter().find(|c| c.rule == rule)
    }

    /// Percentage by which `other` exceeds `base`, integrated and max:
    /// `100 (other / base - 1)`.
    pub fn ratio(&self, other: Ex7Rule, base: Ex7Rule) -> Option<RatioRow> {
        let (o, b) = (self.get(other)?, self.get(base)?);
        Some(RatioRow {
            criterion: self.criterion,
            rule: other,
            baseline: base,
            integrated_pct: 100.0 * (o.integrated / b.integrated - 1.0),
            max_pct: 100.0 * (o.max / b.max - 1.0),
        })
    }

    /// All ordered pairs of distinct rules.
    pub fn ratio_table(&self) -> Vec<RatioRow> {
        let mut rows = Vec::new();
        for a in &self.curves {
            for b in &self.curves {
                if a.rule != b.rule {
                    rows.extend(self.ratio(a.rule, b.rule));
                }
            }
        }
        rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRow {
    pub criterion: Criterion,
    pub rule: Ex7Rule,
    pub baseline: Ex7Rule,
    pub integrated_pct: f64,
    pub max_pct: f64,
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

fn curves(cfg: &Ex7Config, criterion: Criterion) -> Result<Ex7Curves> {
    let h0 = cfg.grid()?;
    let curves = cfg
        .rules
        .iter()
        .map(|&rule| {
            let c = threshold(rule, cfg.root_tol)?;
            let values: Vec<f64> = h0.par_iter().map(|&h| excess(criterion, c, h)).collect();
            let (i_max, max) = values
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            Ok(RuleCurve {
                rule,
                threshold: c,
                integrated: trapezoid(&h0, &values),
                max,
                argmax: h0[i_max],
                values,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Ex7Curves { criterion, h0, curves })
}

pub fn ex7_excess_risk_curve(cfg: &Ex7Config) -> Result<Ex7Curves> {
    curves(cfg, Criterion::Risk)
}

pub fn ex7_excess_regret_curve(cfg: &Ex7Config) -> Result<Ex7Curves> {
    curves(cfg, Criterion::Regret)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub reps: usize,
}

const MC_CHUNK: usize = 1 << 16;

/// Simulated excess of `rule` at `h0`: draws `ĥ ~ N(h0, 1)`, applies the
/// rule itself (not its threshold) and averages the realized excess.
pub fn ex7_monte_carlo(
    rule: Ex7Rule,
    criterion: Criterion,
    h0: f64,
    reps: usize,
    seed: u64,
) -> Result<McEstimate> {
    if reps == 0 {
        return Err(Error::InvalidInput("reps must be positive".into()));
    }
    let chunks = reps.div_ceil(MC_CHUNK);
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = MC_CHUNK.min(reps - c * MC_CHUNK);
            (0..n).fold((0.0, 0.0), |(s, q), _| {
                let z: f64 = StandardNormal.sample(&mut rng);
                let x = excess_given(criterion, rule.decide(h0 + z), h0);
                (s + x, q + x * x)
            })
        })
        .collect::<Vec<(f64, f64)>>()
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = reps as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
    Ok(McEstimate { mean, std_error: (var / n).sqrt(), reps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_examples() {
        assert_eq!(ex7_bounds(0.25).unwrap(), BinaryBounds { p_lower: 0.25, p_upper: 0.5 });
        assert_eq!(ex7_bounds(0.5).unwrap(), BinaryBounds { p_lower: 0.5, p_upper: 0.5 });
        let b = ex7_bounds(0.6).unwrap();
        assert!((b.p_upper - 0.7).abs() < 1e-15);
        assert_eq!(ex7_bounds(0.9).unwrap().p_upper, 1.0);
        assert!(ex7_bounds(0.0).is_err());
        assert!(ex7_bounds(1.0).is_err());
    }

    #[test]
    fn rule_examples() {
        let d = ex7_rules(0.0).unwrap();
        assert_eq!((d.bayes_mm, d.plugin), (1, 1));
        let d = ex7_rules(-0.2).unwrap();
        assert_eq!((d.bayes_mm, d.plugin), (1, 0));
        let d = ex7_rules(-3.0).unwrap();
        assert_eq!((d.bayes_mm, d.plugin, d.bayes_mmr, d.posterior_mean_plugin), (0, 0, 0, 0));
        assert!(ex7_rules(f64::NAN).is_err());
    }

    #[test]
    fn thresholds() {
        let mm = threshold(Ex7Rule::BayesMm, 1e-12).unwrap();
        // Root of ĥ(1 + 2Φ(ĥ)) + 2φ(ĥ), found independently by Newton.
        let f = |x: f64| x * (1.0 + 2.0 * cdf(x)) + 2.0 * pdf(x);
        let df = |x: f64| 1.0 + 2.0 * cdf(x);
        let mut x = -0.5;
        for _ in 0..50 {
            x -= f(x) / df(x);
        }
        assert!((mm - x).abs() < 1e-11, "{mm} vs {x}");
        assert!(threshold(Ex7Rule::Plugin, 1e-12).unwrap().abs() < 1e-11);
        let mmr = threshold(Ex7Rule::BayesMmr, 1e-12).unwrap();
        assert!(mmr > mm && mmr < 0.0);
    }

    #[test]
    fn closed_form_points() {
        assert!((excess(Criterion::Risk, 0.0, 1.0) - 3.0 * cdf(-1.0)).abs() < 1e-15);
        assert!((excess(Criterion::Risk, 0.0, 1.0) - 0.4760).abs() < 1e-4);
        assert!((excess(Criterion::Regret, 0.0, -1.0) - 2.0 * cdf(-1.0)).abs() < 1e-15);
        assert!((excess(Criterion::Regret, 0.0, -1.0) - 0.3173).abs() < 1e-4);
        for c in [-0.4, 0.0, 0.3] {
            assert_eq!(excess(Criterion::Risk, c, 0.0), 0.0);
            assert_eq!(excess(Criterion::Regret, c, 0.0), 0.0);
        }
    }

    #[test]
    fn grid_is_symmetric() {
        let g = Ex7Config::default().grid().unwrap();
        assert_eq!(g.len(), 1601);
        assert_eq!(g[800], 0.0);
        assert!(g.iter().zip(g.iter().rev()).all(|(a, b)| a == &-b));
        let bad = Ex7Config { step: 0.03, ..Ex7Config::default() };
        assert!(bad.grid().is_err());
    }

    #[test]
    fn monte_carlo_at_zero_is_exact() {
        for rule in Ex7Rule::ALL {
            let e = ex7_monte_carlo(rule, Criterion::Risk, 0.0, 1000, 1).unwrap();
            assert_eq!((e.mean, e.std_error), (0.0, 0.0));
        }
    }

    #[test]
    fn monte_carlo_matches_plugin_formula() {
        let e = ex7_monte_carlo(Ex7Rule::Plugin, Criterion::Risk, 1.0, 200_000, 9).unwrap();
        let exact = excess(Criterion::Risk, 0.0, 1.0);
        assert!((e.mean - exact).abs() < 3.0 * e.std_error + 1e-12, "{e:?} vs {exact}");
        let again = ex7_monte_carlo(Ex7Rule::Plugin, Criterion::Risk, 1.0, 200_000, 9).unwrap();
        assert_eq!(e, again);
    }
}
