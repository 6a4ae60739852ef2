//! Bayesian robust forecasts: the worst-case objective averaged over
//! posterior (or bootstrap) draws of the reduced form, then minimized.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{
    bernoulli_kl, minimax_classification, mmr_classification, mmr_log, BinaryBounds, Criterion,
    Decision, LossSpec, MultinomialBounds, TIE_TOL,
};
use crate::error::{Error, Result};
use crate::linear_model::golden_section_max;
use crate::panel::HistoryDistribution;

/// Share of skipped draws above which a report carries a warning.
pub const SKIP_WARN_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PosteriorSource {
    /// Dirichlet(1 + counts).
    DirichletFlat,
    /// Dirichlet(alpha + counts).
    DirichletCustom(Vec<f64>),
    /// Multinomial resamples of the observed counts.
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorDraws {
    pub t: usize,
    /// One simplex vector per draw.
    pub draws: Vec<Vec<f64>>,
    pub source: PosteriorSource,
    pub seed: u64,
}

/// Draws `s` reduced-form vectors from the posterior of the history
/// distribution, or bootstrap resamples of it. Draw `i` uses its own
/// stream of the seeded generator, so a run with more draws extends a run
/// with fewer.
pub fn draw_posterior(
    h: &HistoryDistribution,
    s: usize,
    seed: u64,
    source: PosteriorSource,
) -> Result<PosteriorDraws> {
    if s == 0 {
        return Err(Error::InvalidInput("number of draws must be positive".into()));
    }
    let counts = h
        .counts
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("posterior draws need observed counts".into()))?;
    let k = counts.len();
    let n: u64 = counts.iter().sum();

    let alpha: Option<Vec<f64>> = match &source {
        PosteriorSource::DirichletFlat => Some(counts.iter().map(|c| 1.0 + *c as f64).collect()),
        PosteriorSource::DirichletCustom(prior) => {
            if prior.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "prior has {} entries for {k} histories",
                    prior.len()
                )));
            }
            if prior.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
                return Err(Error::InvalidInput("Dirichlet prior must be positive".into()));
            }
            Some(prior.iter().zip(counts).map(|(a, c)| a + *c as f64).collect())
        }
        PosteriorSource::Bootstrap => {
            if n == 0 {
                return Err(Error::InvalidInput("bootstrap needs at least one observation".into()));
            }
            None
        }
    };

    let draws = (0..s)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            match &alpha {
                Some(alpha) => dirichlet(alpha, &mut rng),
                None => bootstrap(counts, n, &mut rng),
            }
        })
        .collect::<Result<_>>()?;
    Ok(PosteriorDraws { t: h.t, draws, source, seed })
}

fn dirichlet(alpha: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let mut g = alpha
        .iter()
        .map(|a| {
            Gamma::new(*a, 1.0)
                .map(|d| d.sample(rng))
                .map_err(|e| Error::InvalidInput(format!("Gamma({a}, 1): {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = g.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("Dirichlet draw underflowed to zero".into()));
    }
    g.iter_mut().for_each(|x| *x /= total);
    Ok(g)
}

fn bootstrap(counts: &[u64], n: u64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let pick = WeightedIndex::new(counts).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut tally = vec![0u64; counts.len()];
    for _ in 0..n {
        tally[pick.sample(rng)] += 1;
    }
    Ok(tally.iter().map(|c| *c as f64 / n as f64).collect())
}

/// Per-draw bounds for the draws with a nonempty identified set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsSample<B> {
    pub bounds: Vec<B>,
    /// Draws whose identified set was empty.
    pub skipped: usize,
    pub total: usize,
}

impl<B> BoundsSample<B> {
    pub fn new(bounds: Vec<B>) -> Self {
        let total = bounds.len();
        Self { bounds, skipped: 0, total }
    }

    pub fn warning(&self) -> Option<String> {
        (self.skipped as f64 > SKIP_WARN_FRACTION * self.total as f64).then(|| {
            format!(
                "{} of {} draws had an empty identified set and were skipped",
                self.skipped, self.total
            )
        })
    }

    fn require_nonempty(&self) -> Result<usize> {
        if self.bounds.is_empty() {
            Err(Error::AllDrawsInfeasible { skipped: self.skipped, total: self.total })
        } else {
            Ok(self.bounds.len())
        }
    }
}

/// Evaluates `bounds_of` on every draw, skipping draws it reports as
/// [`Error::EmptyIdentifiedSet`]. Repeated draws are solved once.
pub fn bounds_sample<B, F>(draws: &PosteriorDraws, bounds_of: F) -> Result<BoundsSample<B>>
where
    B: Clone + Send,
    F: Fn(&[f64]) -> Result<B> + Sync,
{
    let key = |d: &[f64]| d.iter().map(|x| x.to_bits()).collect::<Vec<u64>>();
    let mut unique: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut reps: Vec<&[f64]> = Vec::new();
    let slot: Vec<usize> = draws
        .draws
        .iter()
        .map(|d| {
            *unique.entry(key(d)).or_insert_with(|| {
                reps.push(d);
                reps.len() - 1
            })
        })
        .collect();
    let solved: Vec<Option<B>> = reps
        .par_iter()
        .map(|d| match bounds_of(d) {
            Ok(b) => Ok(Some(b)),
            Err(Error::EmptyIdentifiedSet) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut bounds = Vec::with_capacity(slot.len());
    let mut skipped = 0;
    for i in slot {
        match &solved[i] {
            Some(b) => bounds.push(b.clone()),
            None => skipped += 1,
        }
    }
    Ok(BoundsSample { bounds, skipped, total: draws.draws.len() })
}

/// Running mean; exact when all values are equal, so repeated draws agree
/// with a single one.
fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    let mut m = 0.0;
    let mut k = 0usize;
    for v in values {
        k += 1;
        m += (v - m) / k as f64;
    }
    debug_assert_eq!(k, n);
    m
}

fn require_binary(loss: &LossSpec) -> Result<()> {
    loss.validate()?;
    if loss.kind != crate::decision::LossKind::Binary {
        return Err(Error::UnsupportedRule(format!("rule needs binary loss, got {:?}", loss.kind)));
    }
    Ok(())
}

/// Bayesian robust forecast under binary loss and the risk criterion.
pub fn bayes_minimax_binary(loss: &LossSpec, bs: &BoundsSample<BinaryBounds>) -> Result<Decision> {
    require_binary(loss)?;
    let n = bs.require_nonempty()?;
    let (a01, a10) = (loss.a01, loss.a10);
    let rhs = mean(bs.bounds.iter().map(|b| a01 * b.p_lower + a10 * b.p_upper), n);
    Ok(Decision::discrete(usize::from(a01 <= rhs), (rhs - a01).abs() < TIE_TOL))
}

/// Bayesian robust forecast under binary loss and the regret criterion.
/// The positive parts are taken draw by draw and then averaged.
pub fn bayes_mmr_binary(loss: &LossSpec, bs: &BoundsSample<BinaryBounds>) -> Result<Decision> {
    require_binary(loss)?;
    let n = bs.require_nonempty()?;
    let a = loss.threshold();
    let left = mean(bs.bounds.iter().map(|b| (a - b.p_lower).max(0.0)), n);
    let right = mean(bs.bounds.iter().map(|b| (b.p_upper - a).max(0.0)), n);
    Ok(Decision::discrete(usize::from(left <= right), (left - right).abs() < TIE_TOL))
}

/// Averaged lower and upper probabilities.
pub fn mean_bounds(bs: &BoundsSample<BinaryBounds>) -> Result<(f64, f64)> {
    let n = bs.require_nonempty()?;
    Ok((
        mean(bs.bounds.iter().map(|b| b.p_lower), n),
        mean(bs.bounds.iter().map(|b| b.p_upper), n),
    ))
}

/// Bayesian robust forecast under quadratic loss and the risk criterion.
pub fn bayes_minimax_quadratic(bs: &BoundsSample<BinaryBounds>) -> Result<Decision> {
    let (lo, hi) = mean_bounds(bs)?;
    Ok(Decision::continuous(0.5_f64.clamp(lo, hi)))
}

/// Posterior-averaged worst-case quadratic regret of forecast `d`.
pub fn quadratic_regret_objective(bs: &BoundsSample<BinaryBounds>, d: f64) -> f64 {
    mean(
        bs.bounds.iter().map(|b| {
            let far = if d < 0.5 * (b.p_lower + b.p_upper) { b.p_upper } else { b.p_lower };
            (far - d).powi(2)
        }),
        bs.bounds.len(),
    )
}

/// Bayesian robust forecast under quadratic loss and the regret criterion.
///
/// The objective is a quadratic between consecutive midpoints, so the
/// minimum is found exactly among the clamped vertices of the pieces and
/// the breakpoints themselves.
pub fn bayes_mmr_quadratic(bs: &BoundsSample<BinaryBounds>) -> Result<Decision> {
    let n = bs.require_nonempty()?;
    let mut mids: Vec<f64> = bs.bounds.iter().map(|b| 0.5 * (b.p_lower + b.p_upper)).collect();
    mids.sort_by(f64::total_cmp);
    mids.dedup();
    let mut edges = vec![0.0];
    edges.extend(mids.iter().copied().filter(|m| *m > 0.0 && *m < 1.0));
    edges.push(1.0);

    let mut candidates = Vec::with_capacity(3 * edges.len());
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        // On [a, b) draws with midpoint above a are still far from p_U.
        let vertex = mean(
            bs.bounds.iter().map(|x| if a < 0.5 * (x.p_lower + x.p_upper) { x.p_upper } else { x.p_lower }),
            n,
        );
        candidates.push(vertex.clamp(a, b));
        candidates.push(a);
    }
    candidates.push(1.0);
    let best = candidates
        .into_iter()
        .map(|d| (quadratic_regret_objective(bs, d), d))
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)))
        .expect("nonempty candidate set");
    Ok(Decision::continuous(best.1))
}

/// Posterior-averaged worst-case log-loss regret of forecast `d`.
pub fn log_regret_objective(bs: &BoundsSample<BinaryBounds>, d: f64) -> f64 {
    mean(
        bs.bounds.iter().map(|b| bernoulli_kl(b.p_lower, d).max(bernoulli_kl(b.p_upper, d))),
        bs.bounds.len(),
    )
}

/// Bayesian robust forecast under log loss and the regret criterion, by
/// golden-section search on the convex objective.
pub fn bayes_mmr_log(bs: &BoundsSample<BinaryBounds>) -> Result<Decision> {
    bs.require_nonempty()?;
    if bs.bounds.iter().all(|b| *b == bs.bounds[0]) {
        // One distinct draw: the averaged objective is the single-draw
        // objective, whose minimizer has a closed form.
        return Ok(mmr_log(&bs.bounds[0]));
    }
    let lo = bs.bounds.iter().map(|b| b.p_lower).fold(f64::INFINITY, f64::min);
    let hi = bs.bounds.iter().map(|b| b.p_upper).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return Ok(Decision::continuous(lo));
    }
    let (d, _) = golden_section_max(lo, hi, 1e-10, |d| Ok(-log_regret_objective(bs, d)))?;
    Ok(Decision::continuous(d.clamp(lo, hi)))
}

/// Averaged multinomial bounds.
pub fn mean_multinomial(bs: &BoundsSample<MultinomialBounds>) -> Result<MultinomialBounds> {
    let n = bs.require_nonempty()?;
    let m = bs.bounds[0].lower.len();
    if bs.bounds.iter().any(|b| b.lower.len() != m || b.regret_gaps.len() != m) {
        return Err(Error::DimensionMismatch("draws disagree on the number of outcomes".into()));
    }
    let avg = |f: &dyn Fn(&MultinomialBounds) -> &Vec<f64>| -> Vec<f64> {
        (0..m).map(|j| mean(bs.bounds.iter().map(|b| f(b)[j]), n)).collect()
    };
    Ok(MultinomialBounds { lower: avg(&|b| &b.lower), regret_gaps: avg(&|b| &b.regret_gaps) })
}

/// Bayesian robust forecast under classification loss.
pub fn bayes_classification(
    bs: &BoundsSample<MultinomialBounds>,
    criterion: Criterion,
) -> Result<Decision> {
    let avg = mean_multinomial(bs)?;
    Ok(match criterion {
        Criterion::Risk => minimax_classification(&avg).0,
        Criterion::Regret => mmr_classification(&avg).0,
    })
}
