//! Point forecasts as functions of probability bounds.
//!
//! Every rule here is a closed-form map from a [`BinaryBounds`] or a
//! [`MultinomialBounds`] to a [`Decision`]. Indicator rules use the weak
//! inequality, so a boundary case resolves to forecasting 1 (binary) or to
//! the smallest index (classification), and the `tie` flag is raised when
//! the comparison is within [`TIE_TOL`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used to flag ties in indicator rules.
pub const TIE_TOL: f64 = 1e-12;

/// Tolerance on the simplex constraint for probability vectors.
pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// Weighted zero-one loss on a {0, 1} decision.
    Binary,
    /// Squared error on a forecast probability in [0, 1].
    Quadratic,
    /// Negative log score on a forecast probability in [0, 1].
    Log,
    /// Zero-one loss on a decision in {0, ..., M}.
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    /// Penalty for forecasting 1 when the outcome is 0.
    pub a01: f64,
    /// Penalty for forecasting 0 when the outcome is 1.
    pub a10: f64,
    /// Number of outcomes M + 1; only meaningful for classification.
    pub num_outcomes: usize,
}

impl LossSpec {
    pub fn binary(a01: f64, a10: f64) -> Result<Self> {
        let spec = Self { kind: LossKind::Binary, a01, a10, num_outcomes: 2 };
        spec.validate()?;
        Ok(spec)
    }

    /// Symmetric binary loss, equivalent to classification with two outcomes.
    pub fn symmetric() -> Self {
        Self { kind: LossKind::Binary, a01: 1.0, a10: 1.0, num_outcomes: 2 }
    }

    pub fn quadratic() -> Self {
        Self { kind: LossKind::Quadratic, a01: 1.0, a10: 1.0, num_outcomes: 2 }
    }

    pub fn log() -> Self {
        Self { kind: LossKind::Log, a01: 1.0, a10: 1.0, num_outcomes: 2 }
    }

    pub fn classification(num_outcomes: usize) -> Result<Self> {
        let spec = Self { kind: LossKind::Classification, a01: 1.0, a10: 1.0, num_outcomes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            LossKind::Binary => {
                let ok = self.a01.is_finite()
                    && self.a10.is_finite()
                    && self.a01 >= 0.0
                    && self.a10 >= 0.0
                    && self.a01 + self.a10 > 0.0;
                if !ok {
                    return Err(Error::InvalidInput(format!(
                        "binary loss needs a01, a10 >= 0 with a positive sum (got {}, {})",
                        self.a01, self.a10
                    )));
                }
            }
            LossKind::Classification if self.num_outcomes < 2 => {
                return Err(Error::InvalidInput(format!(
                    "classification needs at least 2 outcomes (got {})",
                    self.num_outcomes
                )));
            }
            _ => {}
        }
        Ok(())
    }

    /// Threshold a01 / (a01 + a10) of the binary rules.
    pub fn threshold(&self) -> f64 {
        self.a01 / (self.a01 + self.a10)
    }
}

/// Extreme forecast probabilities of Y = 1 over the identified set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryBounds {
    pub p_lower: f64,
    pub p_upper: f64,
}

impl BinaryBounds {
    pub fn new(p_lower: f64, p_upper: f64) -> Result<Self> {
        let ok = (0.0..=1.0).contains(&p_lower)
            && (0.0..=1.0).contains(&p_upper)
            && p_lower <= p_upper;
        if !ok {
            return Err(Error::InvalidInput(format!(
                "bounds must satisfy 0 <= p_L <= p_U <= 1 (got {p_lower}, {p_upper})"
            )));
        }
        Ok(Self { p_lower, p_upper })
    }

    pub fn point(p: f64) -> Result<Self> {
        Self::new(p, p)
    }
}

/// Sufficient statistics of the classification rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialBounds {
    /// Lowest probability of each outcome over the identified set.
    pub lower: Vec<f64>,
    /// Worst-case regret of forecasting each outcome.
    pub regret_gaps: Vec<f64>,
}

impl MultinomialBounds {
    pub fn new(lower: Vec<f64>, regret_gaps: Vec<f64>) -> Result<Self> {
        let in_unit = |v: &[f64]| v.iter().all(|x| (0.0..=1.0).contains(x));
        if !in_unit(&lower) || !in_unit(&regret_gaps) {
            return Err(Error::InvalidInput(
                "multinomial bounds must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = lower.iter().sum();
        if total > 1.0 + SIMPLEX_TOL {
            return Err(Error::InvalidInput(format!(
                "lower probabilities sum to {total} > 1"
            )));
        }
        Ok(Self { lower, regret_gaps })
    }

    /// Two-outcome bounds implied by binary bounds on P(Y = 1).
    pub fn from_binary(b: &BinaryBounds) -> Self {
        Self {
            lower: vec![1.0 - b.p_upper, b.p_lower],
            regret_gaps: vec![(2.0 * b.p_upper - 1.0).max(0.0), (1.0 - 2.0 * b.p_lower).max(0.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    /// Set for binary and classification losses.
    pub discrete: Option<usize>,
    /// Set for quadratic and log losses.
    pub continuous: Option<f64>,
    /// The rule's decision boundary was hit within [`TIE_TOL`].
    pub tie: bool,
    /// All decisions attaining the optimum when `tie` is set.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub tie_set: Vec<usize>,
}

impl Decision {
    pub fn discrete(d: usize, tie: bool) -> Self {
        let tie_set = if tie { vec![0, 1] } else { Vec::new() };
        Self { discrete: Some(d), continuous: None, tie, tie_set }
    }

    pub fn continuous(d: f64) -> Self {
        Self { discrete: None, continuous: Some(d), tie: false, tie_set: Vec::new() }
    }

    fn indexed(d: usize, tie_set: Vec<usize>) -> Self {
        let tie = tie_set.len() > 1;
        Self {
            discrete: Some(d),
            continuous: None,
            tie,
            tie_set: if tie { tie_set } else { Vec::new() },
        }
    }

    /// Numeric value of the decision regardless of its type.
    pub fn value(&self) -> f64 {
        match (self.discrete, self.continuous) {
            (Some(d), _) => d as f64,
            (None, Some(c)) => c,
            (None, None) => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Risk,
    Regret,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub value: f64,
    pub criterion: Criterion,
}

/// A forecast probability: a scalar P(Y = 1) or a full outcome vector.
#[derive(Debug, Clone, Copy)]
pub enum ForecastProbability<'a> {
    Scalar(f64),
    Vector(&'a [f64]),
}

/// Forecast that minimizes expected loss when the forecast distribution is
/// known.
pub fn theta_optimal(loss: &LossSpec, p: ForecastProbability<'_>) -> Result<Decision> {
    loss.validate()?;
    match (loss.kind, p) {
        (LossKind::Classification, ForecastProbability::Vector(v)) => {
            if v.len() != loss.num_outcomes {
                return Err(Error::DimensionMismatch(format!(
                    "expected {} outcome probabilities, got {}",
                    loss.num_outcomes,
                    v.len()
                )));
            }
            check_simplex(v)?;
            Ok(argmax_smallest(v))
        }
        (LossKind::Classification, ForecastProbability::Scalar(_)) => Err(Error::InvalidInput(
            "classification loss needs a probability vector".into(),
        )),
        (kind, p) => {
            let p = match p {
                ForecastProbability::Scalar(p) => p,
                ForecastProbability::Vector(v) if v.len() == 2 => {
                    check_simplex(v)?;
                    v[1]
                }
                ForecastProbability::Vector(v) => {
                    return Err(Error::DimensionMismatch(format!(
                        "binary outcome needs 2 probabilities, got {}",
                        v.len()
                    )))
                }
            };
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!("probability {p} outside [0, 1]")));
            }
            match kind {
                LossKind::Binary => {
                    let a = loss.threshold();
                    Ok(Decision::discrete(usize::from(p >= a), (p - a).abs() < TIE_TOL))
                }
                _ => Ok(Decision::continuous(p)),
            }
        }
    }
}

fn check_simplex(v: &[f64]) -> Result<()> {
    let sum: f64 = v.iter().sum();
    if v.iter().any(|x| !(0.0..=1.0).contains(x)) || (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::SimplexViolation { sum });
    }
    Ok(())
}

fn require_binary(loss: &LossSpec) -> Result<()> {
    loss.validate()?;
    if loss.kind != LossKind::Binary {
        return Err(Error::InvalidInput(format!(
            "rule needs binary loss, got {:?}",
            loss.kind
        )));
    }
    Ok(())
}

/// Minimax forecast under weighted binary loss.
pub fn minimax_binary(loss: &LossSpec, b: &BinaryBounds) -> Result<(Decision, RiskReport)> {
    require_binary(loss)?;
    let (a01, a10) = (loss.a01, loss.a10);
    let rhs = a01 * b.p_lower + a10 * b.p_upper;
    let d = Decision::discrete(usize::from(a01 <= rhs), (rhs - a01).abs() < TIE_TOL);
    let risk = (a01 * (1.0 - b.p_lower)).min(a10 * b.p_upper);
    Ok((d, RiskReport { value: risk, criterion: Criterion::Risk }))
}

/// Minimax-regret forecast under weighted binary loss.
pub fn minimax_regret_binary(
    loss: &LossSpec,
    b: &BinaryBounds,
) -> Result<(Decision, RiskReport)> {
    require_binary(loss)?;
    let scale = loss.a01 + loss.a10;
    let a = loss.threshold();
    let left = (a - b.p_lower).max(0.0);
    let right = (b.p_upper - a).max(0.0);
    let d = Decision::discrete(usize::from(left <= right), (left - right).abs() < TIE_TOL);
    let regret = scale * left.min(right);
    Ok((d, RiskReport { value: regret, criterion: Criterion::Regret }))
}

/// Minimax forecast under quadratic loss: 1/2 clamped to the bounds.
pub fn minimax_quadratic(b: &BinaryBounds) -> Decision {
    Decision::continuous(0.5_f64.clamp(b.p_lower, b.p_upper))
}

/// Minimax forecast under log loss; coincides with the quadratic rule.
pub fn minimax_log(b: &BinaryBounds) -> Decision {
    minimax_quadratic(b)
}

/// Minimax-regret forecast under quadratic loss.
pub fn mmr_quadratic(b: &BinaryBounds) -> (Decision, RiskReport) {
    let half = 0.5 * (b.p_upper - b.p_lower);
    (
        Decision::continuous(0.5 * (b.p_lower + b.p_upper)),
        RiskReport { value: half * half, criterion: Criterion::Regret },
    )
}

/// Bernoulli entropy with the convention 0 log 0 = 0.
pub fn bernoulli_entropy(p: f64) -> f64 {
    let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    -xlogx(p) - xlogx(1.0 - p)
}

/// KL divergence between Bernoulli(p) and Bernoulli(d).
pub fn bernoulli_kl(p: f64, d: f64) -> f64 {
    let term = |x: f64, y: f64| {
        if x <= 0.0 {
            0.0
        } else if y <= 0.0 {
            f64::INFINITY
        } else {
            x * (x / y).ln()
        }
    };
    term(p, d) + term(1.0 - p, 1.0 - d)
}

/// Right-hand side of the log-odds equation solved by [`mmr_log`]; the
/// forecast equalizes the KL divergence to both endpoints.
pub fn mmr_log_slope(b: &BinaryBounds) -> f64 {
    (bernoulli_entropy(b.p_lower) - bernoulli_entropy(b.p_upper)) / (b.p_upper - b.p_lower)
}

/// Minimax-regret forecast under log loss.
pub fn mmr_log(b: &BinaryBounds) -> Decision {
    if b.p_upper - b.p_lower <= 0.0 {
        return Decision::continuous(b.p_lower);
    }
    let d = crate::normal::logistic(mmr_log_slope(b));
    Decision::continuous(d.clamp(b.p_lower, b.p_upper))
}

/// Minimax forecast under classification loss.
pub fn minimax_classification(mb: &MultinomialBounds) -> (Decision, RiskReport) {
    let d = argmax_smallest(&mb.lower);
    let best = mb.lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (d, RiskReport { value: 1.0 - best, criterion: Criterion::Risk })
}

/// Minimax-regret forecast under classification loss.
pub fn mmr_classification(mb: &MultinomialBounds) -> (Decision, RiskReport) {
    let negated: Vec<f64> = mb.regret_gaps.iter().map(|x| -x).collect();
    let d = argmax_smallest(&negated);
    let best = mb.regret_gaps.iter().copied().fold(f64::INFINITY, f64::min);
    (d, RiskReport { value: best, criterion: Criterion::Regret })
}

/// Smallest index attaining the maximum; every index within [`TIE_TOL`] of
/// the maximum goes into the tie set.
pub(crate) fn argmax_smallest(v: &[f64]) -> Decision {
    let best = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = v
        .iter()
        .enumerate()
        .filter(|(_, &x)| best - x < TIE_TOL)
        .map(|(i, _)| i)
        .collect();
    Decision::indexed(tied[0], tied)
}
