//! Dynamic binary choice panel with a discrete random effect.
//!
//! Outcomes follow `P(Y_t = 1 | Y_{t-1}, lambda) = F(beta Y_{t-1} + lambda)`
//! with `F` the probit or logit link, an initial condition `Y_0` and a
//! heterogeneity `lambda` whose joint distribution is left unrestricted on a
//! finite support. Histories `y^T` are indexed lexicographically with `y_1`
//! as the most significant bit.

use std::path::Path;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_model::{uniform_grid, LinearSetSpec};
use crate::normal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    #[default]
    Probit,
    Logit,
}

impl Link {
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Link::Probit => normal::cdf(x),
            Link::Logit => normal::logistic(x),
        }
    }
}

/// Which forecast functional of the mixing distribution is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ForecastConditioning {
    /// `b_l = F(beta y_T + lambda_l)`: the one-step transition from the last
    /// observed outcome, integrated against the mixing distribution.
    #[default]
    LastOutcome,
    /// `b_l = F(beta y_T + lambda_l) p(y^T | y0_l, lambda_l) / P(y^T)`: the
    /// forecast given the entire observed history.
    FullHistory,
}

/// How weights are attached to the heterogeneity grid of a normal design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaWeights {
    /// Normal mass of the cell between neighbouring midpoints; the outer
    /// cells extend to infinity.
    #[default]
    NormalBins,
    /// Normal density at the grid point, renormalized.
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelModelSpec {
    /// Number of observed periods.
    pub t: usize,
    /// Support of the heterogeneity, strictly increasing.
    pub lambda_grid: Vec<f64>,
    pub link: Link,
    /// Conditioning history y_1..y_T.
    pub history: Vec<u8>,
    pub conditioning: ForecastConditioning,
}

impl PanelModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::InvalidInput("T must be at least 1".into()));
        }
        if self.t > 20 {
            return Err(Error::InvalidInput(format!("T = {} gives too many histories", self.t)));
        }
        if self.lambda_grid.is_empty()
            || self.lambda_grid.iter().any(|x| !x.is_finite())
            || self.lambda_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidInput(
                "lambda grid must be nonempty, finite and strictly increasing".into(),
            ));
        }
        validate_history(&self.history, self.t)
    }

    /// Support points are (lambda, y0) pairs with y0 as the outer index.
    pub fn support_size(&self) -> usize {
        2 * self.lambda_grid.len()
    }

    fn support(&self) -> impl Iterator<Item = (u8, f64)> + '_ {
        [0u8, 1].into_iter().flat_map(move |y0| self.lambda_grid.iter().map(move |&l| (y0, l)))
    }
}

fn validate_history(history: &[u8], t: usize) -> Result<()> {
    if history.len() != t {
        return Err(Error::InvalidInput(format!(
            "history has {} periods, expected T = {t}",
            history.len()
        )));
    }
    if history.iter().any(|y| *y > 1) {
        return Err(Error::InvalidInput("history entries must be 0 or 1".into()));
    }
    Ok(())
}

/// Parses a history string such as `"010"`.
pub fn parse_history(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::InvalidInput(format!("history '{s}' must contain only 0 and 1"))),
        })
        .collect()
}

pub fn format_history(h: &[u8]) -> String {
    h.iter().map(|y| if *y == 1 { '1' } else { '0' }).collect()
}

/// Position of a history in the lexicographic order.
pub fn history_index(history: &[u8]) -> usize {
    history.iter().fold(0, |acc, &y| (acc << 1) | usize::from(y))
}

/// All 2^T histories in lexicographic order.
pub fn all_histories(t: usize) -> Vec<Vec<u8>> {
    (0..1usize << t)
        .map(|i| (0..t).map(|k| ((i >> (t - 1 - k)) & 1) as u8).collect())
        .collect()
}

/// Probability of the history `y` given the initial condition and the
/// heterogeneity.
pub fn history_prob(y: &[u8], y0: u8, lambda: f64, beta: f64, link: Link) -> f64 {
    let mut prev = y0;
    let mut p = 1.0;
    for &yt in y {
        let q = link.cdf(beta * f64::from(prev) + lambda);
        p *= if yt == 1 { q } else { 1.0 - q };
        prev = yt;
    }
    p
}

/// Distribution of the reduced form over the 2^T histories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryDistribution {
    pub t: usize,
    /// Probabilities in lexicographic history order.
    pub probs: Vec<f64>,
    /// Observed counts behind `probs`, when estimated from data.
    pub counts: Option<Vec<u64>>,
}

impl HistoryDistribution {
    pub fn new(t: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << t {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for T = {t} (need {})",
                probs.len(),
                1usize << t
            )));
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::SimplexViolation { sum });
        }
        Ok(Self { t, probs, counts: None })
    }

    pub fn from_counts(t: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != 1 << t {
            return Err(Error::DimensionMismatch(format!(
                "{} counts for T = {t} (need {})",
                counts.len(),
                1usize << t
            )));
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidInput("no observations".into()));
        }
        let probs = counts.iter().map(|c| *c as f64 / n as f64).collect();
        Ok(Self { t, probs, counts: Some(counts) })
    }

    pub fn prob(&self, history: &[u8]) -> f64 {
        self.probs[history_index(history)]
    }

    pub fn num_observations(&self) -> Option<u64> {
        self.counts.as_ref().map(|c| c.iter().sum())
    }
}

/// Builds the linear identified set for the forecast of `Y_{T+1} = 1` given
/// the conditioning history of `m`, with `beta` ranging over `beta_grid`.
pub fn build_panel_spec(
    m: &PanelModelSpec,
    p: &HistoryDistribution,
    beta_grid: Vec<f64>,
) -> Result<LinearSetSpec> {
    m.validate()?;
    if p.t != m.t {
        return Err(Error::DimensionMismatch(format!(
            "model has T = {} but data has T = {}",
            m.t, p.t
        )));
    }
    let p_hist = p.prob(&m.history);
    if p_hist <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "conditioning history {} has probability zero",
            format_history(&m.history)
        )));
    }
    let histories = all_histories(m.t);
    let support: Vec<(u8, f64)> = m.support().collect();
    let link = m.link;

    let g_support = support.clone();
    let build_g = Arc::new(move |beta: f64| {
        histories
            .iter()
            .map(|h| g_support.iter().map(|&(y0, l)| history_prob(h, y0, l, beta, link)).collect())
            .collect()
    });

    let history = m.history.clone();
    let y_t = f64::from(*history.last().expect("T >= 1"));
    let conditioning = m.conditioning;
    let build_b = Arc::new(move |beta: f64, outcome: usize| {
        support
            .iter()
            .map(|&(y0, l)| {
                let q = link.cdf(beta * y_t + l);
                let q = if outcome == 1 { q } else { 1.0 - q };
                match conditioning {
                    ForecastConditioning::LastOutcome => q,
                    ForecastConditioning::FullHistory => {
                        q * history_prob(&history, y0, l, beta, link) / p_hist
                    }
                }
            })
            .collect()
    });

    LinearSetSpec::new(beta_grid, m.support_size(), p.probs.clone(), 2, build_g, build_b)?
        .as_history_model()
}

/// A data-generating process for the panel model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub beta0: f64,
    pub lambda_grid: Vec<f64>,
    /// Marginal weights of the heterogeneity grid.
    pub lambda_weights: Vec<f64>,
    /// P(Y0 = 1); one entry when Y0 is independent of lambda, otherwise one
    /// entry per grid point.
    pub y0_prob: Vec<f64>,
    pub link: Link,
}

impl DgpSpec {
    pub fn independent(&self) -> bool {
        self.y0_prob.len() == 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda_weights.len() != self.lambda_grid.len() {
            return Err(Error::DimensionMismatch("lambda weights and grid differ in length".into()));
        }
        let sum: f64 = self.lambda_weights.iter().sum();
        if self.lambda_weights.iter().any(|w| *w < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::SimplexViolation { sum });
        }
        if !(self.y0_prob.len() == 1 || self.y0_prob.len() == self.lambda_grid.len())
            || self.y0_prob.iter().any(|p| !(0.0..=1.0).contains(p))
        {
            return Err(Error::InvalidInput("invalid P(Y0 = 1) specification".into()));
        }
        Ok(())
    }

    fn y0_prob_at(&self, l: usize) -> f64 {
        if self.independent() {
            self.y0_prob[0]
        } else {
            self.y0_prob[l]
        }
    }

    /// Joint mixing weights over (lambda, y0) support points, y0 outer.
    pub fn mixing_weights(&self) -> Vec<f64> {
        let n = self.lambda_grid.len();
        let mut w = vec![0.0; 2 * n];
        for l in 0..n {
            let p1 = self.y0_prob_at(l);
            w[l] = self.lambda_weights[l] * (1.0 - p1);
            w[n + l] = self.lambda_weights[l] * p1;
        }
        w
    }

    /// Exact population distribution over histories of length `t`.
    pub fn history_distribution(&self, t: usize) -> Result<HistoryDistribution> {
        self.validate()?;
        let w = self.mixing_weights();
        let n = self.lambda_grid.len();
        let probs: Vec<f64> = all_histories(t)
            .iter()
            .map(|h| {
                (0..2 * n)
                    .map(|s| w[s] * history_prob(h, (s / n) as u8, self.lambda_grid[s % n], self.beta0, self.link))
                    .sum()
            })
            .collect();
        // Renormalize away summation rounding.
        let total: f64 = probs.iter().sum();
        HistoryDistribution::new(t, probs.into_iter().map(|p| p / total).collect())
    }

    /// True value of the forecast functional bounded by the spec built from
    /// `m`.
    pub fn forecast_truth(&self, m: &PanelModelSpec) -> Result<f64> {
        m.validate()?;
        let w = self.mixing_weights();
        let n = self.lambda_grid.len();
        let y_t = f64::from(*m.history.last().expect("T >= 1"));
        let mut num = 0.0;
        let mut den = 0.0;
        for s in 0..2 * n {
            let (y0, l) = ((s / n) as u8, self.lambda_grid[s % n]);
            let q = self.link.cdf(self.beta0 * y_t + l);
            match m.conditioning {
                ForecastConditioning::LastOutcome => {
                    num += w[s] * q;
                    den += w[s];
                }
                ForecastConditioning::FullHistory => {
                    let ph = history_prob(&m.history, y0, l, self.beta0, self.link);
                    num += w[s] * q * ph;
                    den += w[s] * ph;
                }
            }
        }
        Ok(num / den)
    }

    /// Simulates `n` independent histories of length `t`.
    pub fn simulate(&self, t: usize, n: usize, seed: u64) -> Result<Vec<Vec<u8>>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda_dist = WeightedIndex::new(&self.lambda_weights)
            .map_err(|e| Error::InvalidInput(format!("lambda weights: {e}")))?;
        Ok((0..n)
            .map(|_| {
                let l = lambda_dist.sample(&mut rng);
                let lambda = self.lambda_grid[l];
                let mut prev = u8::from(rng.random::<f64>() < self.y0_prob_at(l));
                (0..t)
                    .map(|_| {
                        let q = self.link.cdf(self.beta0 * f64::from(prev) + lambda);
                        prev = u8::from(rng.random::<f64>() < q);
                        prev
                    })
                    .collect()
            })
            .collect())
    }
}

/// The probit design with `beta0 = 0.2`, heterogeneity on `-3:0.2:3` with
/// standard normal weights, and `Y0 ~ Bernoulli(1/2)` independent of the
/// heterogeneity.
pub fn honore_tamer_dgp(t: usize) -> Result<(DgpSpec, HistoryDistribution)> {
    honore_tamer_dgp_with(t, LambdaWeights::NormalBins)
}

pub fn honore_tamer_dgp_with(
    t: usize,
    weights: LambdaWeights,
) -> Result<(DgpSpec, HistoryDistribution)> {
    let lambda_grid: Vec<f64> = (0..=30).map(|i| -3.0 + 0.2 * i as f64).collect();
    let lambda_weights = normal_weights(&lambda_grid, weights);
    let dgp = DgpSpec {
        beta0: 0.2,
        lambda_grid,
        lambda_weights,
        y0_prob: vec![0.5],
        link: Link::Probit,
    };
    let p = dgp.history_distribution(t)?;
    Ok((dgp, p))
}

/// Standard normal weights on a sorted grid.
pub fn normal_weights(grid: &[f64], kind: LambdaWeights) -> Vec<f64> {
    let raw: Vec<f64> = match kind {
        LambdaWeights::Density => grid.iter().map(|&x| normal::pdf(x)).collect(),
        LambdaWeights::NormalBins => (0..grid.len())
            .map(|i| {
                let lo = if i == 0 { f64::NEG_INFINITY } else { 0.5 * (grid[i - 1] + grid[i]) };
                let hi = if i + 1 == grid.len() { f64::INFINITY } else { 0.5 * (grid[i] + grid[i + 1]) };
                // Upper tail differences keep precision for positive cells.
                normal::cdf(-lo) - normal::cdf(-hi)
            })
            .collect(),
    };
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Model spec for the Honore-Tamer design conditioning on `history`.
pub fn honore_tamer_model(history: Vec<u8>) -> PanelModelSpec {
    PanelModelSpec {
        t: history.len(),
        lambda_grid: (0..=30).map(|i| -3.0 + 0.2 * i as f64).collect(),
        link: Link::Probit,
        history,
        conditioning: ForecastConditioning::LastOutcome,
    }
}

/// Default search grid for beta: [-5, 5] in steps of 0.01.
pub fn default_beta_grid() -> Vec<f64> {
    uniform_grid(-5.0, 5.0, 0.01).expect("static grid")
}

/// Tallies a panel CSV with header `y1,...,yT` and 0/1 cells.
pub fn ingest_panel_csv(path: impl AsRef<Path>) -> Result<HistoryDistribution> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| Error::Io { path: display.clone(), source })?;
    ingest_panel_reader(file, &display)
}

pub fn ingest_panel_reader<R: std::io::Read>(reader: R, name: &str) -> Result<HistoryDistribution> {
    let parse_err = |message: String| Error::Parse { path: name.to_string(), message };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    let t = headers.len();
    if t == 0 || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(parse_err("empty file".into()));
    }
    for (k, h) in headers.iter().enumerate() {
        if h != format!("y{}", k + 1) {
            return Err(parse_err(format!("column {} is named '{h}', expected 'y{}'", k + 1, k + 1)));
        }
    }
    if t > 20 {
        return Err(parse_err(format!("{t} periods is too many")));
    }
    let mut counts = vec![0u64; 1 << t];
    for (row, rec) in rdr.records().enumerate() {
        // Line numbers count the header as line 1.
        let line = row + 2;
        let rec = rec.map_err(|e| parse_err(format!("line {line}: {e}")))?;
        if rec.len() != t {
            return Err(parse_err(format!("line {line}: {} cells, expected {t}", rec.len())));
        }
        let mut idx = 0usize;
        for (k, cell) in rec.iter().enumerate() {
            let y = match cell {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(parse_err(format!(
                        "line {line}, column y{}: value '{other}' is not 0 or 1",
                        k + 1
                    )))
                }
            };
            idx = (idx << 1) | y;
        }
        counts[idx] += 1;
    }
    if counts.iter().all(|c| *c == 0) {
        return Err(parse_err("no data rows".into()));
    }
    HistoryDistribution::from_counts(t, counts)
}

/// Tallies simulated histories.
pub fn tally_histories(t: usize, rows: &[Vec<u8>]) -> Result<HistoryDistribution> {
    let mut counts = vec![0u64; 1 << t];
    for r in rows {
        validate_history(r, t)?;
        counts[history_index(r)] += 1;
    }
    HistoryDistribution::from_counts(t, counts)
}

/// Draws a history uniformly at random; used by property tests.
pub fn random_history<R: Rng>(rng: &mut R, t: usize) -> Vec<u8> {
    (0..t).map(|_| u8::from(rng.random::<bool>())).collect()
}
