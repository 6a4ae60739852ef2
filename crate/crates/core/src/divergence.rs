//! Extreme forecast probabilities over KL neighbourhoods of a reference
//! mixing distribution.
//!
//! For each `phi` the set is `{Pi : KL(Pi || Pi_phi) <= delta, E_Pi g = r}`
//! and the upper value of `E_Pi b` is computed from the convex dual
//!
//! ```text
//! inf_{eta > 0, mu}  eta log E[exp((b + mu'(g - r)) / eta)] + eta delta
//! ```
//!
//! with the expectation under the reference. The lower value is the mirror
//! image obtained by negating `b`. Expectations are exact for discrete
//! references, Gauss-Hermite sums for normal references, or fixed-seed
//! Monte Carlo averages otherwise.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{solve_lp_with, Direction, LpProblem, LpStatus, RowSense, SolverOptions};
use crate::panel::{all_histories, history_prob, Link};

/// Lower bound on the temperature `eta`; below it the dual is evaluated as
/// the essential supremum.
pub const ETA_MIN: f64 = 1e-8;

/// Projected-gradient norm accepted as convergence of the inner problem.
pub const GRADIENT_TOL: f64 = 1e-6;

const MAX_ITER: usize = 500;
/// Relative eta below which the dual is settled by the essential supremum.
const NEAR_FLOOR: f64 = 1e-6;

/// Reference distribution of a scalar heterogeneity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Reference {
    Discrete { points: Vec<f64>, weights: Vec<f64> },
    Normal { mean: f64, sd: f64 },
    Mixture { weights: Vec<f64>, means: Vec<f64>, sds: Vec<f64> },
}

impl Reference {
    pub fn validate(&self) -> Result<()> {
        let simplex = |w: &[f64]| {
            let s: f64 = w.iter().sum();
            w.iter().all(|x| *x >= 0.0) && (s - 1.0).abs() < 1e-9
        };
        let ok = match self {
            Reference::Discrete { points, weights } => {
                !points.is_empty() && points.len() == weights.len() && simplex(weights)
            }
            Reference::Normal { mean, sd } => mean.is_finite() && *sd > 0.0,
            Reference::Mixture { weights, means, sds } => {
                !weights.is_empty()
                    && weights.len() == means.len()
                    && weights.len() == sds.len()
                    && simplex(weights)
                    && sds.iter().all(|s| *s > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid reference distribution {self:?}")))
        }
    }
}

/// How expectations under a continuous reference are approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    MonteCarlo,
    /// Gauss-Hermite rule with the given number of nodes; normal references
    /// only.
    GaussHermite(usize),
}

/// Points and probability weights standing in for a reference distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedSample {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    /// True when the weights are equal Monte Carlo weights.
    pub monte_carlo: bool,
}

impl WeightedSample {
    pub fn from_reference(
        reference: &Reference,
        expectation: Expectation,
        sample_size: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        reference.validate()?;
        match (reference, expectation) {
            (Reference::Discrete { points, weights }, _) => Ok(Self {
                x: points.clone(),
                w: weights.clone(),
                monte_carlo: false,
            }),
            (Reference::Normal { mean, sd }, Expectation::GaussHermite(n)) => {
                let (nodes, weights) = gauss_hermite(n)?;
                let scale = std::f64::consts::SQRT_2 * sd;
                let norm = std::f64::consts::PI.sqrt();
                Ok(Self {
                    x: nodes.iter().map(|z| mean + scale * z).collect(),
                    w: weights.iter().map(|w| w / norm).collect(),
                    monte_carlo: false,
                })
            }
            (Reference::Mixture { .. }, Expectation::GaussHermite(_)) => Err(Error::InvalidInput(
                "Gauss-Hermite quadrature needs a normal reference".into(),
            )),
            (_, Expectation::MonteCarlo) => {
                if sample_size == 0 {
                    return Err(Error::InvalidInput("sample size must be positive".into()));
                }
                let x = draw(reference, sample_size, rng)?;
                Ok(Self { x, w: vec![1.0 / sample_size as f64; sample_size], monte_carlo: true })
            }
        }
    }
}

fn draw(reference: &Reference, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let bad = |e: String| Error::InvalidInput(e);
    match reference {
        Reference::Normal { mean, sd } => {
            let d = Normal::new(*mean, *sd).map_err(|e| bad(e.to_string()))?;
            Ok((0..n).map(|_| d.sample(rng)).collect())
        }
        Reference::Mixture { weights, means, sds } => {
            let pick = WeightedIndex::new(weights).map_err(|e| bad(e.to_string()))?;
            let comps: Vec<Normal<f64>> = means
                .iter()
                .zip(sds)
                .map(|(m, s)| Normal::new(*m, *s).map_err(|e| bad(e.to_string())))
                .collect::<Result<_>>()?;
            Ok((0..n).map(|_| comps[pick.sample(rng)].sample(rng)).collect())
        }
        Reference::Discrete { points, weights } => {
            let pick = WeightedIndex::new(weights).map_err(|e| bad(e.to_string()))?;
            Ok((0..n).map(|_| points[pick.sample(rng)]).collect())
        }
    }
}

/// Nodes and weights of the `n`-point Gauss-Hermite rule for the weight
/// `exp(-x^2)`, by Newton iteration on the orthonormal recurrence.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 200 {
        return Err(Error::InvalidInput(format!("Gauss-Hermite order {n} outside 1..=200")));
    }
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!("Gauss-Hermite node {i} of {n} did not converge")));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    // Ascending order.
    x.reverse();
    w.reverse();
    Ok((x, w))
}

/// Callback giving the reference distribution at `phi`.
pub type ReferenceFn = dyn Fn(f64) -> Reference + Send + Sync;
/// Outcome weight `b(x, phi, m)`.
pub type ObjectiveFn = dyn Fn(f64, f64, usize) -> f64 + Send + Sync;
/// Moment functions `g(x, phi)`, length K.
pub type MomentsFn = dyn Fn(f64, f64) -> Vec<f64> + Send + Sync;

/// A KL neighbourhood identified set.
#[derive(Clone)]
pub struct ContinuousSetSpec {
    pub phi_grid: Vec<f64>,
    pub reference: Arc<ReferenceFn>,
    pub b: Arc<ObjectiveFn>,
    pub g: Arc<MomentsFn>,
    /// Moment targets; empty for no moment restrictions.
    pub r: Vec<f64>,
    /// KL radius.
    pub delta: f64,
    pub num_outcomes: usize,
    /// Outcome whose probability is bounded by the upper and lower values.
    pub outcome: usize,
    /// Declared range of `b`, checked on every sample.
    pub b_range: (f64, f64),
    pub expectation: Expectation,
    pub sample_size: usize,
    pub seed: u64,
}

impl fmt::Debug for ContinuousSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousSetSpec")
            .field("phi_grid_len", &self.phi_grid.len())
            .field("r", &self.r)
            .field("delta", &self.delta)
            .field("num_outcomes", &self.num_outcomes)
            .field("outcome", &self.outcome)
            .field("expectation", &self.expectation)
            .field("sample_size", &self.sample_size)
            .field("seed", &self.seed)
            .finish_non_exhaustive()
    }
}

impl ContinuousSetSpec {
    /// Spec with a single reference, no moment restrictions and a binary
    /// probability objective `b(x, phi, 1)`.
    pub fn unrestricted(reference: Reference, b: Arc<ObjectiveFn>, delta: f64) -> Self {
        Self {
            phi_grid: vec![0.0],
            reference: Arc::new(move |_| reference.clone()),
            b,
            g: Arc::new(|_, _| Vec::new()),
            r: Vec::new(),
            delta,
            num_outcomes: 2,
            outcome: 1,
            b_range: (0.0, 1.0),
            expectation: Expectation::MonteCarlo,
            sample_size: 100_000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidInput(format!("KL radius must be finite and >= 0, got {}", self.delta)));
        }
        if self.phi_grid.is_empty() || self.phi_grid.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("phi grid must be nonempty and finite".into()));
        }
        if self.outcome >= self.num_outcomes {
            return Err(Error::InvalidInput(format!(
                "outcome {} out of range for {} outcomes",
                self.outcome, self.num_outcomes
            )));
        }
        if self.b_range.0 > self.b_range.1 {
            return Err(Error::InvalidInput("b range is empty".into()));
        }
        Ok(())
    }

    fn sample(&self, index: usize) -> Result<WeightedSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        WeightedSample::from_reference(
            &(self.reference)(self.phi_grid[index]),
            self.expectation,
            self.sample_size,
            &mut rng,
        )
    }
}

/// Evaluated sample at one `phi`: objective values and centred moments.
#[derive(Debug, Clone)]
pub struct DualData {
    pub b: Vec<f64>,
    /// g(x_i) - r for each sample point.
    pub gc: Vec<Vec<f64>>,
    pub w: Vec<f64>,
    pub monte_carlo: bool,
}

impl DualData {
    fn k(&self) -> usize {
        self.gc.first().map_or(0, Vec::len)
    }

    /// Weighted mean of the objective.
    pub fn mean_b(&self) -> f64 {
        self.b.iter().zip(&self.w).map(|(b, w)| b * w).sum()
    }

    fn support_max_b(&self) -> f64 {
        self.b.iter().zip(&self.w).filter(|(_, w)| **w > 0.0).map(|(b, _)| *b).fold(f64::NEG_INFINITY, f64::max)
    }

    fn support_min_b(&self) -> f64 {
        self.b.iter().zip(&self.w).filter(|(_, w)| **w > 0.0).map(|(b, _)| *b).fold(f64::INFINITY, f64::min)
    }

    fn negated(&self) -> Self {
        Self { b: self.b.iter().map(|x| -x).collect(), ..self.clone() }
    }

    fn z(&self, mu: &[f64]) -> Vec<f64> {
        self.b
            .iter()
            .zip(&self.gc)
            .map(|(b, g)| b + g.iter().zip(mu).map(|(gi, m)| gi * m).sum::<f64>())
            .collect()
    }
}

/// Weighted log-sum-exp `log sum w_i exp(u_i)` and the tilted weights.
fn log_sum_exp(u: &[f64], w: &[f64]) -> (f64, Vec<f64>) {
    let umax = u
        .iter()
        .zip(w)
        .filter(|(_, w)| **w > 0.0)
        .map(|(u, _)| *u)
        .fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = u.iter().zip(w).map(|(u, w)| if *w > 0.0 { w * (u - umax).exp() } else { 0.0 }).collect();
    let s: f64 = e.iter().sum();
    (umax + s.ln(), e.into_iter().map(|x| x / s).collect())
}

/// Dual objective `eta log E exp(z / eta) + eta delta` with
/// `z = b + mu'(g - r)`. Below [`ETA_MIN`] it is the essential supremum
/// of `z`.
pub fn kl_dual_objective(data: &DualData, delta: f64, eta: f64, mu: &[f64]) -> f64 {
    let z = data.z(mu);
    if eta < ETA_MIN {
        return z.iter().zip(&data.w).filter(|(_, w)| **w > 0.0).map(|(z, _)| *z).fold(f64::NEG_INFINITY, f64::max);
    }
    let u: Vec<f64> = z.iter().map(|z| z / eta).collect();
    eta * log_sum_exp(&u, &data.w).0 + eta * delta
}

/// Value and gradient with respect to `(log eta, mu)`.
fn objective_and_gradient(data: &DualData, delta: f64, theta: &[f64]) -> (f64, Vec<f64>) {
    let eta = theta[0].exp();
    let mu = &theta[1..];
    let z = data.z(mu);
    let u: Vec<f64> = z.iter().map(|z| z / eta).collect();
    let (lse, tilt) = log_sum_exp(&u, &data.w);
    let value = eta * lse + eta * delta;
    let mean_u: f64 = tilt.iter().zip(&u).map(|(t, u)| t * u).sum();
    let mut grad = Vec::with_capacity(theta.len());
    grad.push(eta * (lse - mean_u + delta));
    for k in 0..mu.len() {
        grad.push(tilt.iter().zip(&data.gc).map(|(t, g)| t * g[k]).sum());
    }
    (value, grad)
}

/// Solution of the inner dual problem at one `phi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerKl {
    pub feasible: bool,
    pub value: f64,
    pub eta: f64,
    pub mu: Vec<f64>,
    /// Delta-method standard error of the Monte Carlo value; zero for exact
    /// expectations.
    pub std_error: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

/// Upper value `sup E_Pi b` over the KL ball intersected with the moment
/// restrictions, by quasi-Newton minimization of the dual.
pub fn inner_upper(data: &DualData, delta: f64) -> Result<InnerKl> {
    let k = data.k();
    let min_b = data.support_min_b();
    let max_b = data.support_max_b();
    let span = (max_b - min_b).abs().max(1e-12);
    let infeasible = |iterations| InnerKl {
        feasible: false,
        value: f64::NEG_INFINITY,
        eta: f64::NAN,
        mu: vec![f64::NAN; k],
        std_error: 0.0,
        iterations,
        gradient_norm: f64::NAN,
    };

    if delta == 0.0 {
        // The ball is the reference alone.
        let moments_hold = (0..k).all(|j| {
            data.gc.iter().zip(&data.w).map(|(g, w)| g[j] * w).sum::<f64>().abs() <= 1e-10
        });
        if !moments_hold {
            return Ok(infeasible(0));
        }
        return Ok(InnerKl {
            feasible: true,
            value: data.mean_b(),
            eta: f64::INFINITY,
            mu: vec![0.0; k],
            std_error: mc_std_error_mean(data),
            iterations: 0,
            gradient_norm: 0.0,
        });
    }

    let s_min = ETA_MIN.ln();
    let n = k + 1;
    let mut theta = vec![span.max(1e-3).ln(); 1];
    theta.extend(std::iter::repeat_n(0.0, k));
    let (mut f, mut grad) = objective_and_gradient(data, delta, &theta);
    let mut h = identity(n);
    let mut iterations = 0;
    let divergence_floor = min_b - 1e-6 * (1.0 + span);

    let project = |theta: &[f64], g: &mut [f64]| {
        if theta[0] <= s_min && g[0] > 0.0 {
            g[0] = 0.0;
        }
    };
    let mut pg = grad.clone();
    project(&theta, &mut pg);
    let mut stalled = false;
    while norm(&pg) > GRADIENT_TOL && iterations < MAX_ITER {
        iterations += 1;
        let mut dir: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| h[i][j] * pg[j]).sum::<f64>()).collect();
        if theta[0] <= s_min && dir[0] < 0.0 {
            dir[0] = 0.0;
        }
        let mut slope: f64 = dir.iter().zip(&pg).map(|(d, g)| d * g).sum();
        if slope >= 0.0 {
            h = identity(n);
            dir = pg.iter().map(|g| -g).collect();
            slope = -norm(&pg).powi(2);
        }
        // Backtracking Armijo search; eta stays above its floor.
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut cand: Vec<f64> = theta.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
            cand[0] = cand[0].max(s_min).min(700.0);
            let (fc, gc) = objective_and_gradient(data, delta, &cand);
            if fc.is_finite() && fc <= f + 1e-4 * t * slope {
                accepted = Some((cand, fc, gc));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, fc, gc)) = accepted else {
            // No decrease at machine precision: converged in value.
            stalled = true;
            break;
        };
        if fc < divergence_floor {
            // Below every feasible value: the moment restrictions cannot be
            // met inside the ball.
            return Ok(infeasible(iterations));
        }
        let s: Vec<f64> = cand.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gc.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-14 {
            bfgs_update(&mut h, &s, &y, sy);
        }
        let improvement = f - fc;
        theta = cand;
        f = fc;
        grad = gc;
        pg = grad.clone();
        project(&theta, &mut pg);
        if improvement <= 1e-15 * (1.0 + f.abs()) && norm(&s) <= 1e-13 * (1.0 + norm(&theta)) {
            stalled = true;
            break;
        }
    }

    let gnorm = norm(&pg);
    // Near the eta floor the objective is close to the nonsmooth essential
    // supremum and the log-eta gradient is scaled by eta, so neither the
    // gradient test nor its failure is informative there. That case is
    // settled by the linear program below.
    let near_floor = theta[0].exp() <= NEAR_FLOOR * span;
    if gnorm > GRADIENT_TOL && !stalled && !near_floor {
        return Err(Error::Numerical(format!(
            "KL dual did not converge: gradient norm {gnorm:.3e} after {iterations} iterations \
             (value {f}, eta {:.3e})",
            theta[0].exp()
        )));
    }
    // An unbounded descent in mu shows up as a value below every feasible
    // one, or as multipliers running off to infinity.
    let mu_norm = norm(&theta[1..]);
    if f < divergence_floor || (mu_norm > 1e8) {
        return Ok(infeasible(iterations));
    }
    let eta = theta[0].exp();
    // Every dual value bounds the supremum from above, and so does max b.
    let mut value = f.min(max_b);
    if near_floor {
        // The radius is (nearly) slack: the limit eta -> 0 is the essential
        // supremum, minimized over mu by a linear program on the support.
        match essential_sup_value(data)? {
            Some(v) => value = value.min(v),
            None => return Ok(infeasible(iterations)),
        }
    }
    Ok(InnerKl {
        feasible: true,
        value,
        eta,
        mu: theta[1..].to_vec(),
        std_error: mc_std_error_tilted(data, eta, &theta[1..]),
        iterations,
        gradient_norm: gnorm,
    })
}

/// `min_mu ess sup (b + mu'(g - r))`, equal to `sup E_Pi b` over mixing
/// distributions on the reference support meeting the moments; `None`
/// when no such distribution exists.
fn essential_sup_value(data: &DualData) -> Result<Option<f64>> {
    let k = data.k();
    let support: Vec<usize> = (0..data.b.len()).filter(|&i| data.w[i] > 0.0).collect();
    if k == 0 {
        return Ok(Some(data.support_max_b()));
    }
    let mut lp = LpProblem::new(support.iter().map(|&i| data.b[i]).collect(), Direction::Maximize);
    for j in 0..k {
        lp = lp.with_row(support.iter().map(|&i| data.gc[i][j]).collect(), RowSense::Eq, 0.0);
    }
    lp = lp.with_row(vec![1.0; support.len()], RowSense::Eq, 1.0);
    let opts = SolverOptions { max_nonzeros: usize::MAX, ..SolverOptions::default() };
    let sol = solve_lp_with(&lp, opts)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Numerical("bounded program reported unbounded".into())),
    }
}

/// Lower value `inf E_Pi b`, the mirror image of [`inner_upper`].
pub fn inner_lower(data: &DualData, delta: f64) -> Result<InnerKl> {
    let mut res = inner_upper(&data.negated(), delta)?;
    res.value = -res.value;
    Ok(res)
}

fn mc_std_error_mean(data: &DualData) -> f64 {
    if !data.monte_carlo {
        return 0.0;
    }
    let n = data.b.len() as f64;
    let mean = data.mean_b();
    let var = data.b.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (var / n).sqrt()
}

fn mc_std_error_tilted(data: &DualData, eta: f64, mu: &[f64]) -> f64 {
    if !data.monte_carlo {
        return 0.0;
    }
    let z = data.z(mu);
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|z| ((z - zmax) / eta).exp()).collect();
    let n = e.len() as f64;
    let mean = e.iter().sum::<f64>() / n;
    let var = e.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    eta * (var / n).sqrt() / mean
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Inverse-Hessian BFGS update.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    let rho = 1.0 / sy;
    for i in 0..n {
        for j in 0..n {
            h[i][j] += (1.0 + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

/// Upper or lower extreme value with the maximizing parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KlBound {
    pub value: f64,
    pub phi: f64,
    pub std_error: f64,
    pub feasible_points: usize,
    pub inner: InnerKl,
}

fn dual_data<F>(spec: &ContinuousSetSpec, index: usize, objective: &F) -> Result<DualData>
where
    F: Fn(f64, f64) -> f64,
{
    let phi = spec.phi_grid[index];
    let sample = spec.sample(index)?;
    let (lo, hi) = spec.b_range;
    let b: Vec<f64> = sample.x.iter().map(|&x| objective(x, phi)).collect();
    if let Some(bad) = b.iter().find(|v| !(lo..=hi).contains(*v)) {
        return Err(Error::InvalidInput(format!(
            "objective value {bad} outside its declared range [{lo}, {hi}] at phi = {phi}"
        )));
    }
    let k = spec.r.len();
    let gc: Vec<Vec<f64>> = sample
        .x
        .iter()
        .map(|&x| {
            let g = (spec.g)(x, phi);
            if g.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "g returned {} moments, r has {k}",
                    g.len()
                )));
            }
            Ok(g.iter().zip(&spec.r).map(|(g, r)| g - r).collect())
        })
        .collect::<Result<_>>()?;
    Ok(DualData { b, gc, w: sample.w, monte_carlo: sample.monte_carlo })
}

/// Extreme value of `E_Pi objective` over all `phi`; `upper` selects the
/// supremum.
pub fn extreme_value<F>(spec: &ContinuousSetSpec, objective: F, upper: bool) -> Result<KlBound>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    spec.validate()?;
    let results: Vec<InnerKl> = (0..spec.phi_grid.len())
        .into_par_iter()
        .map(|i| {
            let data = dual_data(spec, i, &objective)?;
            let res = if upper { inner_upper(&data, spec.delta) } else { inner_lower(&data, spec.delta) };
            res.map_err(|e| match e {
                Error::Numerical(m) => Error::Numerical(format!("at phi = {}: {m}", spec.phi_grid[i])),
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    let feasible_points = results.iter().filter(|r| r.feasible).count();
    let best = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.feasible)
        .reduce(|a, b| {
            let better = if upper { b.1.value > a.1.value } else { b.1.value < a.1.value };
            if better {
                b
            } else {
                a
            }
        })
        .ok_or(Error::EmptyIdentifiedSet)?;
    Ok(KlBound {
        value: best.1.value,
        phi: spec.phi_grid[best.0],
        std_error: best.1.std_error,
        feasible_points,
        inner: best.1.clone(),
    })
}

fn clamp_unit(x: f64) -> Result<f64> {
    if !(-1e-6..=1.0 + 1e-6).contains(&x) {
        return Err(Error::Numerical(format!("probability bound {x} outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Upper forecast probability of `spec.outcome`.
pub fn dual_extreme_upper(spec: &ContinuousSetSpec) -> Result<f64> {
    let b = spec.b.clone();
    let m = spec.outcome;
    let bound = extreme_value(spec, |x, phi| b(x, phi, m), true)?;
    clamp_unit(bound.value)
}

/// Lower forecast probability of `spec.outcome`.
pub fn dual_extreme_lower(spec: &ContinuousSetSpec) -> Result<f64> {
    let b = spec.b.clone();
    let m = spec.outcome;
    let bound = extreme_value(spec, |x, phi| b(x, phi, m), false)?;
    clamp_unit(bound.value)
}

/// Worst-case regret of forecasting outcome `m`.
pub fn multinomial_regret_gap(spec: &ContinuousSetSpec, m: usize) -> Result<f64> {
    if m >= spec.num_outcomes {
        return Err(Error::InvalidInput(format!("outcome {m} out of range")));
    }
    let mut diff_spec = spec.clone();
    diff_spec.b_range = (spec.b_range.0 - spec.b_range.1, spec.b_range.1 - spec.b_range.0);
    let mut gap: f64 = 0.0;
    for m2 in (0..spec.num_outcomes).filter(|&m2| m2 != m) {
        let b = spec.b.clone();
        let bound = extreme_value(&diff_spec, move |x, phi| b(x, phi, m2) - b(x, phi, m), true)?;
        gap = gap.max(bound.value);
    }
    if gap > 1.0 + 1e-6 {
        return Err(Error::Numerical(format!("regret gap {gap} exceeds 1")));
    }
    Ok(gap.clamp(0.0, 1.0))
}

/// Panel model with a continuous heterogeneity and a fixed initial
/// condition: the moments are the history probabilities (all but the last
/// history, which is implied) and the objective is the one-step forecast
/// from the last observed outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelKlModel {
    pub t: usize,
    pub y0: u8,
    pub link: Link,
    /// Last observed outcome y_T.
    pub last_outcome: u8,
    /// Target history probabilities given y0, length 2^T.
    pub history_probs: Vec<f64>,
}

pub fn panel_kl_spec(
    model: &PanelKlModel,
    reference: Reference,
    beta_grid: Vec<f64>,
    delta: f64,
) -> Result<ContinuousSetSpec> {
    if model.history_probs.len() != 1 << model.t {
        return Err(Error::DimensionMismatch(format!(
            "{} history probabilities for T = {}",
            model.history_probs.len(),
            model.t
        )));
    }
    reference.validate()?;
    let histories = all_histories(model.t);
    let k = histories.len() - 1;
    let (y0, link, y_t) = (model.y0, model.link, f64::from(model.last_outcome));
    Ok(ContinuousSetSpec {
        phi_grid: beta_grid,
        reference: Arc::new(move |_| reference.clone()),
        b: Arc::new(move |x, beta, m| {
            let q = link.cdf(beta * y_t + x);
            if m == 1 {
                q
            } else {
                1.0 - q
            }
        }),
        g: Arc::new(move |x, beta| histories[..k].iter().map(|h| history_prob(h, y0, x, beta, link)).collect()),
        r: model.history_probs[..k].to_vec(),
        delta,
        num_outcomes: 2,
        outcome: 1,
        b_range: (0.0, 1.0),
        expectation: Expectation::MonteCarlo,
        sample_size: 100_000,
        seed: 0,
    })
}
