//! Identified sets that are linear in a discrete mixing distribution.
//!
//! For each value of the homogeneous parameter `phi` the set of mixing
//! distributions is `{pi >= 0 : 1'pi = 1, G(phi) pi = r}` and a forecast
//! probability is the linear functional `b(phi)'pi`. Extreme probabilities
//! are found by solving the inner linear programs at every grid point of
//! `phi` (both in primal form and in dual form, as an audit) and then
//! optimizing over `phi` by grid search with golden-section refinement of the
//! best cell.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::decision::{BinaryBounds, MultinomialBounds};
use crate::error::{Error, Result};
use crate::lp::dual::primal_program;
use crate::lp::{dualize, solve_lp, DualForm, Direction, LpStatus, FEASIBILITY_TOL};

/// Primal and dual inner values further apart than this abort the run.
pub const DUALITY_ABORT_TOL: f64 = 1e-6;

/// Overshoot outside [0, 1] tolerated before clamping a probability.
pub const CLAMP_TOL: f64 = 1e-6;

/// Callback returning the K x L moment matrix at `phi`.
pub type MomentFn = dyn Fn(f64) -> Vec<Vec<f64>> + Send + Sync;
/// Callback returning the L outcome weights of outcome `m` at `phi`.
pub type OutcomeFn = dyn Fn(f64, usize) -> Vec<f64> + Send + Sync;

/// An identified set linear in a discrete mixing distribution.
#[derive(Clone)]
pub struct LinearSetSpec {
    /// Candidate values of the homogeneous parameter, in increasing order.
    pub phi_grid: Vec<f64>,
    /// Number of support points L of the mixing distribution.
    pub support_size: usize,
    /// Reduced-form moment targets, length K.
    pub r: Vec<f64>,
    /// Number of outcomes M + 1.
    pub num_outcomes: usize,
    /// Columns of G and the vector r are probability vectors.
    pub history_model: bool,
    /// Refine the best grid cell by golden-section search. Switch off when
    /// the grid is a set of labels rather than a continuum.
    pub refine: bool,
    /// Width at which refinement and endpoint bisection stop.
    pub refine_tol: f64,
    build_g: Arc<MomentFn>,
    build_b: Arc<OutcomeFn>,
}

impl fmt::Debug for LinearSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearSetSpec")
            .field("phi_grid_len", &self.phi_grid.len())
            .field("support_size", &self.support_size)
            .field("r", &self.r)
            .field("num_outcomes", &self.num_outcomes)
            .field("history_model", &self.history_model)
            .field("refine", &self.refine)
            .finish_non_exhaustive()
    }
}

impl LinearSetSpec {
    pub fn new(
        phi_grid: Vec<f64>,
        support_size: usize,
        r: Vec<f64>,
        num_outcomes: usize,
        build_g: Arc<MomentFn>,
        build_b: Arc<OutcomeFn>,
    ) -> Result<Self> {
        if phi_grid.is_empty() {
            return Err(Error::InvalidInput("phi grid is empty".into()));
        }
        if phi_grid.iter().any(|x| !x.is_finite()) || phi_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("phi grid must be finite and strictly increasing".into()));
        }
        if support_size == 0 {
            return Err(Error::InvalidInput("support size must be positive".into()));
        }
        if num_outcomes < 2 {
            return Err(Error::InvalidInput("need at least two outcomes".into()));
        }
        Ok(Self {
            phi_grid,
            support_size,
            r,
            num_outcomes,
            history_model: false,
            refine: true,
            refine_tol: 1e-4,
            build_g,
            build_b,
        })
    }

    /// Marks the spec as a history model and checks its invariants on the
    /// first grid point.
    pub fn as_history_model(mut self) -> Result<Self> {
        let sum: f64 = self.r.iter().sum();
        if self.r.iter().any(|x| *x < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::SimplexViolation { sum });
        }
        let g = self.moment_matrix(self.phi_grid[0])?;
        for l in 0..self.support_size {
            let col: f64 = g.iter().map(|row| row[l]).sum();
            if g.iter().any(|row| row[l] < 0.0) || (col - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "column {l} of G is not a probability vector (sum {col})"
                )));
            }
        }
        self.history_model = true;
        Ok(self)
    }

    pub fn with_refinement(mut self, refine: bool) -> Self {
        self.refine = refine;
        self
    }

    pub fn with_phi_grid(mut self, phi_grid: Vec<f64>) -> Result<Self> {
        if phi_grid.is_empty() || phi_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("phi grid must be nonempty and strictly increasing".into()));
        }
        self.phi_grid = phi_grid;
        Ok(self)
    }

    pub fn num_moments(&self) -> usize {
        self.r.len()
    }

    pub fn moment_matrix(&self, phi: f64) -> Result<Vec<Vec<f64>>> {
        let g = (self.build_g)(phi);
        if g.len() != self.r.len() || g.iter().any(|row| row.len() != self.support_size) {
            return Err(Error::DimensionMismatch(format!(
                "G({phi}) must be {} x {}",
                self.r.len(),
                self.support_size
            )));
        }
        Ok(g)
    }

    pub fn outcome_weights(&self, phi: f64, m: usize) -> Result<Vec<f64>> {
        let b = (self.build_b)(phi, m);
        if b.len() != self.support_size {
            return Err(Error::DimensionMismatch(format!(
                "b({phi}, {m}) has {} entries, expected {}",
                b.len(),
                self.support_size
            )));
        }
        Ok(b)
    }

    /// Phase-one feasibility of the set at `phi`.
    pub fn is_feasible(&self, phi: f64) -> Result<bool> {
        let g = self.moment_matrix(phi)?;
        let zero = vec![0.0; self.support_size];
        let sol = solve_lp(&primal_program(&g, &self.r, &zero, Direction::Minimize))?;
        Ok(sol.status == LpStatus::Optimal && sol.infeasibility <= FEASIBILITY_TOL)
    }

    /// Inner extreme values of `objective(phi)'pi` at one `phi`.
    pub fn inner(&self, phi: f64, objective: &[f64]) -> Result<InnerSolve> {
        let g = self.moment_matrix(phi)?;
        inner_solve(&g, &self.r, objective).map_err(|e| match e {
            Error::Numerical(msg) => Error::Numerical(format!("at phi = {phi}: {msg}")),
            Error::DualityGap(msg) => Error::DualityGap(format!("at phi = {phi}: {msg}")),
            other => other,
        })
    }
}

/// Result of the inner programs at one value of `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerSolve {
    pub feasible: bool,
    /// Inner minimum; `+inf` when infeasible.
    pub lo: f64,
    /// Inner maximum; `-inf` when infeasible.
    pub hi: f64,
    /// Largest |primal - dual| over the two programs.
    pub duality_gap: f64,
    /// Primal phase one and dual disagree about feasibility. Happens only
    /// within the feasibility tolerance of the boundary of the set.
    pub status_mismatch: bool,
}

impl InnerSolve {
    fn infeasible(status_mismatch: bool) -> Self {
        Self {
            feasible: false,
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
            duality_gap: 0.0,
            status_mismatch,
        }
    }
}

/// Solves `inf / sup b'pi` over the constrained simplex in primal form and
/// in dual form and cross-checks the two.
pub fn inner_solve(g: &[Vec<f64>], r: &[f64], b: &[f64]) -> Result<InnerSolve> {
    let hi_primal = solve_lp(&primal_program(g, r, b, Direction::Maximize))?;
    let hi_dual = dualize(g, r, b, DualForm::Inf)?.value()?;
    if hi_primal.status != LpStatus::Optimal {
        return Ok(InnerSolve::infeasible(hi_dual.is_finite()));
    }
    let lo_primal = solve_lp(&primal_program(g, r, b, Direction::Minimize))?;
    let lo_dual = dualize(g, r, b, DualForm::Sup)?.value()?;
    let (Some(hi), Some(lo)) = (hi_primal.value, lo_primal.value) else {
        return Ok(InnerSolve::infeasible(true));
    };
    if !hi_dual.is_finite() || !lo_dual.is_finite() {
        // The primal was accepted within tolerance but the exact system is
        // infeasible; the primal values stand.
        return Ok(InnerSolve { feasible: true, lo, hi, duality_gap: 0.0, status_mismatch: true });
    }
    let gap = (hi - hi_dual).abs().max((lo - lo_dual).abs());
    if gap > DUALITY_ABORT_TOL {
        return Err(Error::DualityGap(format!("max {hi} vs {hi_dual}, min {lo} vs {lo_dual}")));
    }
    Ok(InnerSolve { feasible: true, lo, hi, duality_gap: gap, status_mismatch: false })
}

/// Audit counters collected while computing extreme values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Grid points at which the set is nonempty.
    pub feasible_points: usize,
    pub grid_points: usize,
    /// Largest primal-dual discrepancy over all inner solves.
    pub max_duality_gap: f64,
    /// Inner solves whose primal and dual feasibility verdicts differed.
    pub status_mismatches: usize,
}

impl Diagnostics {
    fn absorb(&mut self, s: &InnerSolve) {
        self.max_duality_gap = self.max_duality_gap.max(s.duality_gap);
        self.status_mismatches += usize::from(s.status_mismatch);
    }
}

/// Extreme binary forecast probabilities with their maximizing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryExtremes {
    pub bounds: BinaryBounds,
    /// Parameter value attaining p_L.
    pub phi_lower: f64,
    /// Parameter value attaining p_U.
    pub phi_upper: f64,
    pub diagnostics: Diagnostics,
}

/// Lower and upper forecast probability of outcome 1.
pub fn extreme_probs_binary(spec: &LinearSetSpec) -> Result<BinaryBounds> {
    extreme_probs_binary_detailed(spec).map(|e| e.bounds)
}

pub fn extreme_probs_binary_detailed(spec: &LinearSetSpec) -> Result<BinaryExtremes> {
    if spec.num_outcomes != 2 {
        return Err(Error::InvalidInput(format!(
            "binary bounds need 2 outcomes, spec has {}",
            spec.num_outcomes
        )));
    }
    let eval = |phi: f64| -> Result<InnerSolve> {
        let b = spec.outcome_weights(phi, 1)?;
        spec.inner(phi, &b)
    };
    let grid = evaluate_grid(spec, &eval)?;
    let mut diag = grid_diagnostics(&grid);
    if diag.feasible_points == 0 {
        return Err(Error::EmptyIdentifiedSet);
    }
    let (phi_u, hi) = refine_extreme(spec, &grid, |s| s.hi, true, &eval, &mut diag)?;
    let (phi_l, lo) = refine_extreme(spec, &grid, |s| s.lo, false, &eval, &mut diag)?;
    let p_lower = clamp_probability(lo, "p_L")?;
    let p_upper = clamp_probability(hi, "p_U")?;
    Ok(BinaryExtremes {
        bounds: BinaryBounds { p_lower: p_lower.min(p_upper), p_upper },
        phi_lower: phi_l,
        phi_upper: phi_u,
        diagnostics: diag,
    })
}

/// Lowest probability of each outcome and worst-case regret of forecasting
/// each outcome.
pub fn extreme_probs_multinomial(spec: &LinearSetSpec) -> Result<MultinomialBounds> {
    extreme_probs_multinomial_detailed(spec).map(|(b, _)| b)
}

pub fn extreme_probs_multinomial_detailed(
    spec: &LinearSetSpec,
) -> Result<(MultinomialBounds, Diagnostics)> {
    let n_out = spec.num_outcomes;
    let mut lower = Vec::with_capacity(n_out);
    let mut gaps = vec![0.0_f64; n_out];
    let mut diag = Diagnostics::default();
    for m in 0..n_out {
        let eval = |phi: f64| -> Result<InnerSolve> {
            let b = spec.outcome_weights(phi, m)?;
            spec.inner(phi, &b)
        };
        let grid = evaluate_grid(spec, &eval)?;
        let gd = grid_diagnostics(&grid);
        if gd.feasible_points == 0 {
            return Err(Error::EmptyIdentifiedSet);
        }
        merge(&mut diag, &gd);
        let (_, lo) = refine_extreme(spec, &grid, |s| s.lo, false, &eval, &mut diag)?;
        lower.push(clamp_probability(lo, "lower probability")?);
    }
    for m in 0..n_out {
        for m2 in (0..n_out).filter(|&m2| m2 != m) {
            let eval = |phi: f64| -> Result<InnerSolve> {
                let bm = spec.outcome_weights(phi, m)?;
                let b2 = spec.outcome_weights(phi, m2)?;
                let diff: Vec<f64> = b2.iter().zip(&bm).map(|(a, b)| a - b).collect();
                spec.inner(phi, &diff)
            };
            let grid = evaluate_grid(spec, &eval)?;
            merge(&mut diag, &grid_diagnostics(&grid));
            let (_, hi) = refine_extreme(spec, &grid, |s| s.hi, true, &eval, &mut diag)?;
            if hi > 1.0 + CLAMP_TOL {
                return Err(Error::Numerical(format!("regret gap {hi} exceeds 1")));
            }
            gaps[m] = gaps[m].max(hi.min(1.0));
        }
    }
    Ok((MultinomialBounds { lower, regret_gaps: gaps }, diag))
}

fn merge(into: &mut Diagnostics, from: &Diagnostics) {
    into.grid_points = into.grid_points.max(from.grid_points);
    into.feasible_points = into.feasible_points.max(from.feasible_points);
    into.max_duality_gap = into.max_duality_gap.max(from.max_duality_gap);
    into.status_mismatches += from.status_mismatches;
}

fn clamp_probability(x: f64, what: &str) -> Result<f64> {
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&x) {
        return Err(Error::Numerical(format!("{what} = {x} lies outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

fn evaluate_grid<F>(spec: &LinearSetSpec, eval: &F) -> Result<Vec<InnerSolve>>
where
    F: Fn(f64) -> Result<InnerSolve> + Sync,
{
    spec.phi_grid.par_iter().map(|&phi| eval(phi)).collect()
}

fn grid_diagnostics(grid: &[InnerSolve]) -> Diagnostics {
    let mut d = Diagnostics {
        grid_points: grid.len(),
        feasible_points: grid.iter().filter(|s| s.feasible).count(),
        ..Default::default()
    };
    for s in grid {
        d.absorb(s);
    }
    d
}

/// Best grid value of `pick`, then golden-section refinement over the two
/// cells adjacent to the best grid point. Infeasible points count as the
/// worst possible value, so refinement never leaves the feasible region.
fn refine_extreme<P, F>(
    spec: &LinearSetSpec,
    grid: &[InnerSolve],
    pick: P,
    maximize: bool,
    eval: &F,
    diag: &mut Diagnostics,
) -> Result<(f64, f64)>
where
    P: Fn(&InnerSolve) -> f64,
    F: Fn(f64) -> Result<InnerSolve>,
{
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let mut best_i = None;
    for (i, s) in grid.iter().enumerate() {
        if s.feasible && best_i.is_none_or(|j: usize| better(pick(s), pick(&grid[j]))) {
            best_i = Some(i);
        }
    }
    let best_i = best_i.ok_or(Error::EmptyIdentifiedSet)?;
    let mut best = (spec.phi_grid[best_i], pick(&grid[best_i]));
    if !spec.refine || spec.phi_grid.len() < 2 {
        return Ok(best);
    }

    // Off the grid, a probe within the feasibility tolerance of the
    // boundary can fail the primal-dual cross-check; it is dropped like an
    // infeasible point and counted as a mismatch.
    let score = |phi: f64, diag: &mut Diagnostics| -> Result<f64> {
        let s = match eval(phi) {
            Err(Error::DualityGap(_)) => {
                diag.status_mismatches += 1;
                return Ok(f64::NEG_INFINITY);
            }
            other => other?,
        };
        diag.absorb(&s);
        Ok(if !s.feasible {
            f64::NEG_INFINITY
        } else if maximize {
            pick(&s)
        } else {
            -pick(&s)
        })
    };
    let a = spec.phi_grid[best_i.saturating_sub(1)];
    let b = spec.phi_grid[(best_i + 1).min(spec.phi_grid.len() - 1)];
    // Search each adjacent cell separately; the objective need not be
    // unimodal across the grid point.
    let centre = spec.phi_grid[best_i];
    for (lo, hi) in [(a, centre), (centre, b)] {
        if hi - lo <= spec.refine_tol {
            continue;
        }
        let (phi, val) = golden_section_max(lo, hi, spec.refine_tol, |x| score(x, diag))?;
        let val = if maximize { val } else { -val };
        if val.is_finite() && better(val, best.1) {
            best = (phi, val);
        }
    }
    Ok(best)
}

/// Golden-section search for the maximum of `f` on `[a, b]`, stopping when
/// the bracket is narrower than `tol`. Returns the best point evaluated.
pub fn golden_section_max<F>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

/// Hull of the feasible parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleInterval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

/// Smallest and largest feasible grid values, each refined by bisection
/// against its infeasible neighbour.
pub fn feasible_phi_interval(spec: &LinearSetSpec) -> Result<FeasibleInterval> {
    let flags: Vec<bool> = spec
        .phi_grid
        .par_iter()
        .map(|&phi| spec.is_feasible(phi))
        .collect::<Result<_>>()?;
    let (Some(first), Some(last)) = (flags.iter().position(|f| *f), flags.iter().rposition(|f| *f))
    else {
        return Ok(FeasibleInterval { lo: f64::NAN, hi: f64::NAN, empty: true });
    };
    let grid = &spec.phi_grid;
    let lo = if first > 0 { bisect_boundary(spec, grid[first], grid[first - 1])? } else { grid[first] };
    let hi = if last + 1 < grid.len() { bisect_boundary(spec, grid[last], grid[last + 1])? } else { grid[last] };
    Ok(FeasibleInterval { lo, hi, empty: false })
}

/// Bisection between a feasible and an infeasible point; returns the
/// midpoint of the final bracket.
fn bisect_boundary(spec: &LinearSetSpec, mut inside: f64, mut outside: f64) -> Result<f64> {
    while (outside - inside).abs() > spec.refine_tol {
        let mid = 0.5 * (inside + outside);
        if spec.is_feasible(mid)? {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

/// One row of a profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub phi: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Inner minimum and maximum of the probability of outcome `m` at every
/// feasible grid point.
pub fn profile_bounds(spec: &LinearSetSpec, m: usize) -> Result<Vec<ProfileRow>> {
    if m >= spec.num_outcomes {
        return Err(Error::InvalidInput(format!(
            "outcome {m} out of range for {} outcomes",
            spec.num_outcomes
        )));
    }
    let rows: Vec<Option<ProfileRow>> = spec
        .phi_grid
        .par_iter()
        .map(|&phi| {
            let b = spec.outcome_weights(phi, m)?;
            let s = spec.inner(phi, &b)?;
            Ok(s.feasible.then_some(ProfileRow { phi, lo: s.lo, hi: s.hi }))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Evenly spaced grid from `min` to `max` inclusive, robust to rounding.
pub fn uniform_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !min.is_finite() || !max.is_finite() || max < min {
        return Err(Error::InvalidInput(format!(
            "invalid grid: min {min}, max {max}, step {step}"
        )));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + step * i as f64).collect())
}
