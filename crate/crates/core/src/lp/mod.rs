//! Dense two-phase simplex solver.
//!
//! Problems are converted to the standard form `min c'z, Az = b, z >= 0` by
//! shifting finite lower bounds, reflecting variables with only an upper
//! bound, splitting free variables, and adding slack or surplus columns.
//! Phase one minimizes the sum of artificial variables; phase two optimizes
//! the real objective. Both phases use Bland's rule, so pivoting is
//! deterministic and cannot cycle.

pub mod dual;

use serde::Serialize;

use crate::error::{Error, Result};

pub use dual::{dualize, dualize_sup, primal_program, DualForm, DualizedProgram};

/// Phase-one optimum above which a problem is declared infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-8;

const PIVOT_TOL: f64 = 1e-11;
const REDUCED_COST_TOL: f64 = 1e-11;

/// Default cap on the number of nonzeros in the constraint matrix.
pub const DEFAULT_MAX_NONZEROS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    /// Row-major constraint matrix, one `Vec` per row.
    pub matrix: Vec<Vec<f64>>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    /// Per-variable lower bounds; `f64::NEG_INFINITY` for none.
    pub lower: Vec<f64>,
    /// Per-variable upper bounds; `f64::INFINITY` for none.
    pub upper: Vec<f64>,
    pub direction: Direction,
}

impl LpProblem {
    /// Problem with all variables nonnegative and no constraints yet.
    pub fn new(objective: Vec<f64>, direction: Direction) -> Self {
        let n = objective.len();
        Self {
            objective,
            matrix: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            direction,
        }
    }

    pub fn with_row(mut self, row: Vec<f64>, sense: RowSense, rhs: f64) -> Self {
        self.matrix.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.len()
    }

    fn validate(&self, max_nonzeros: usize) -> Result<()> {
        let n = self.num_vars();
        let m = self.num_rows();
        if self.senses.len() != m || self.rhs.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{m} constraint rows but {} senses and {} right-hand sides",
                self.senses.len(),
                self.rhs.len()
            )));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} variables but {} lower and {} upper bounds",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if let Some(i) = self.matrix.iter().position(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {n}",
                self.matrix[i].len()
            )));
        }
        let any_nan = self.objective.iter().any(|x| x.is_nan())
            || self.rhs.iter().any(|x| !x.is_finite())
            || self.matrix.iter().flatten().any(|x| !x.is_finite())
            || self.lower.iter().chain(&self.upper).any(|x| x.is_nan());
        if any_nan {
            return Err(Error::InvalidInput("LP data contains NaN or infinite entries".into()));
        }
        if let Some(j) = (0..n).find(|&j| self.lower[j] > self.upper[j]) {
            return Err(Error::InvalidInput(format!(
                "variable {j} has lower bound {} above upper bound {}",
                self.lower[j], self.upper[j]
            )));
        }
        let nnz = self.matrix.iter().flatten().filter(|x| **x != 0.0).count();
        if nnz > max_nonzeros {
            return Err(Error::InvalidInput(format!(
                "constraint matrix has {nnz} nonzeros, limit is {max_nonzeros}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; set only when optimal.
    pub value: Option<f64>,
    /// Primal point in the original variables.
    pub x: Vec<f64>,
    /// Sensitivity of the optimal value to each right-hand side.
    pub duals: Vec<f64>,
    /// Largest violation of a row or bound at `x`.
    pub residual: f64,
    /// Optimal phase-one objective: the total artificial mass that could
    /// not be driven out. Zero up to rounding for feasible problems.
    pub infeasibility: f64,
    pub iterations: usize,
}

/// Solver options; the defaults match the documented limits.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_nonzeros: usize,
    /// Iteration cap as a multiple of (rows + columns) of the standard form.
    pub iteration_factor: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_nonzeros: DEFAULT_MAX_NONZEROS, iteration_factor: 50 }
    }
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    solve_lp_with(p, SolverOptions::default())
}

/// How an original variable maps onto standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + z[col]
    Shift { col: usize, offset: f64 },
    /// x = offset - z[col]
    Reflect { col: usize, offset: f64 },
    /// x = z[pos] - z[neg]
    Split { pos: usize, neg: usize },
}

pub fn solve_lp_with(p: &LpProblem, opts: SolverOptions) -> Result<LpSolution> {
    p.validate(opts.max_nonzeros)?;
    let n = p.num_vars();
    let m_orig = p.num_rows();

    // Map variables to nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (p.lower[j], p.upper[j]);
        let map = if l.is_finite() {
            if u.is_finite() {
                bound_rows.push((ncols, u - l));
            }
            VarMap::Shift { col: ncols, offset: l }
        } else if u.is_finite() {
            VarMap::Reflect { col: ncols, offset: u }
        } else {
            ncols += 1;
            VarMap::Split { pos: ncols - 1, neg: ncols }
        };
        ncols += 1;
        maps.push(map);
    }
    let nstruct = ncols;

    // Rows in terms of structural columns, with rhs shifted by offsets.
    let m = m_orig + bound_rows.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<f64> = Vec::with_capacity(m);
    let mut senses: Vec<RowSense> = Vec::with_capacity(m);
    let mut cost = vec![0.0; nstruct];
    let sign = match p.direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    for (j, map) in maps.iter().enumerate() {
        let c = sign * p.objective[j];
        match *map {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Reflect { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }
    for i in 0..m_orig {
        let mut row = vec![0.0; nstruct];
        let mut b = p.rhs[i];
        for (j, map) in maps.iter().enumerate() {
            let a = p.matrix[i][j];
            if a == 0.0 {
                continue;
            }
            match *map {
                VarMap::Shift { col, offset } => {
                    row[col] += a;
                    b -= a * offset;
                }
                VarMap::Reflect { col, offset } => {
                    row[col] -= a;
                    b -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        rows.push(row);
        rhs.push(b);
        senses.push(p.senses[i]);
    }
    for &(col, width) in &bound_rows {
        let mut row = vec![0.0; nstruct];
        row[col] = 1.0;
        rows.push(row);
        rhs.push(width);
        senses.push(RowSense::Le);
    }

    // Slack and surplus columns.
    let nslack = senses.iter().filter(|s| **s != RowSense::Eq).count();
    let ntotal_noart = nstruct + nslack;
    let mut slack_of_row: Vec<Option<usize>> = vec![None; m];
    let mut next = nstruct;
    for i in 0..m {
        if senses[i] != RowSense::Eq {
            slack_of_row[i] = Some(next);
            next += 1;
        }
    }

    // Flip rows so every right-hand side is nonnegative.
    let mut row_sign = vec![1.0; m];
    for i in 0..m {
        if rhs[i] < 0.0 {
            row_sign[i] = -1.0;
        }
    }

    // A row needs an artificial unless its slack enters with +1.
    let mut identity_col = vec![0usize; m];
    let mut basis = vec![0usize; m];
    let mut nart = 0usize;
    let mut art_rows = Vec::new();
    for i in 0..m {
        let slack_coef = match senses[i] {
            RowSense::Le => 1.0,
            RowSense::Ge => -1.0,
            RowSense::Eq => 0.0,
        } * row_sign[i];
        if slack_coef > 0.0 {
            let s = slack_of_row[i].unwrap();
            identity_col[i] = s;
            basis[i] = s;
        } else {
            identity_col[i] = ntotal_noart + nart;
            basis[i] = ntotal_noart + nart;
            art_rows.push(i);
            nart += 1;
        }
    }
    let width = ntotal_noart + nart;

    // Tableau: m constraint rows plus the objective row; last column is rhs.
    let mut t = Tableau::new(m, width);
    for i in 0..m {
        let s = row_sign[i];
        for j in 0..nstruct {
            t.set(i, j, s * rows[i][j]);
        }
        if let Some(sc) = slack_of_row[i] {
            let coef = if senses[i] == RowSense::Le { 1.0 } else { -1.0 };
            t.set(i, sc, s * coef);
        }
        if identity_col[i] >= ntotal_noart {
            t.set(i, identity_col[i], 1.0);
        }
        t.set(i, width, s * rhs[i]);
    }
    t.snapshot();

    let limit = opts.iteration_factor * (m + width);
    let mut iterations = 0usize;

    // Phase one: minimize the sum of artificials.
    let mut infeasibility = 0.0;
    if nart > 0 {
        let mut phase_cost = vec![0.0; width];
        for c in phase_cost.iter_mut().skip(ntotal_noart) {
            *c = 1.0;
        }
        let status = t.run(&mut basis, &phase_cost, width, true, &mut iterations, limit)?;
        debug_assert_eq!(status, PhaseStatus::Optimal);
        infeasibility = -t.get(m, width);
        if infeasibility > FEASIBILITY_TOL {
            let x = recover_x(&t, &basis, &maps, nstruct);
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: None,
                residual: residual(p, &x),
                x,
                duals: vec![0.0; m_orig],
                infeasibility,
                iterations,
            });
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if basis[i] >= ntotal_noart {
                if let Some(j) = (0..ntotal_noart).find(|&j| t.get(i, j).abs() > PIVOT_TOL) {
                    t.pivot(i, j);
                    basis[i] = j;
                }
            }
        }
    }

    // Phase two over non-artificial columns.
    let mut phase_cost = vec![0.0; width];
    phase_cost[..nstruct].copy_from_slice(&cost);
    let status = t.run(&mut basis, &phase_cost, ntotal_noart, false, &mut iterations, limit)?;
    let x = recover_x(&t, &basis, &maps, nstruct);
    let res = residual(p, &x);
    if status == PhaseStatus::Unbounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: None,
            x,
            duals: vec![0.0; m_orig],
            residual: res,
            infeasibility,
            iterations,
        });
    }

    // The reduced cost of row i's identity column is -y_i of the flipped
    // system; undo the flip and the min/max sign.
    let duals = (0..m_orig)
        .map(|i| {
            let col = identity_col[i];
            let reduced = t.get(m, col) - phase_cost[col];
            sign * row_sign[i] * (-reduced)
        })
        .collect();
    let value: f64 = p.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: Some(value),
        x,
        duals,
        residual: res,
        infeasibility,
        iterations,
    })
}

fn recover_x(t: &Tableau, basis: &[usize], maps: &[VarMap], nstruct: usize) -> Vec<f64> {
    let mut z = vec![0.0; nstruct];
    for (i, &b) in basis.iter().enumerate() {
        if b < nstruct {
            z[b] = t.get(i, t.width);
        }
    }
    maps.iter()
        .map(|map| match *map {
            VarMap::Shift { col, offset } => offset + z[col],
            VarMap::Reflect { col, offset } => offset - z[col],
            VarMap::Split { pos, neg } => z[pos] - z[neg],
        })
        .collect()
}

/// Largest violation of the rows and bounds of `p` at `x`.
pub fn residual(p: &LpProblem, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..p.num_rows() {
        let lhs: f64 = p.matrix[i].iter().zip(x).map(|(a, x)| a * x).sum();
        let v = match p.senses[i] {
            RowSense::Le => (lhs - p.rhs[i]).max(0.0),
            RowSense::Ge => (p.rhs[i] - lhs).max(0.0),
            RowSense::Eq => (lhs - p.rhs[i]).abs(),
        };
        worst = worst.max(v);
    }
    for (j, &xj) in x.iter().enumerate() {
        worst = worst.max((p.lower[j] - xj).max(0.0)).max((xj - p.upper[j]).max(0.0));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhaseStatus {
    Optimal,
    Unbounded,
}

/// Pivots between refactorizations of the basis.
const REINVERT_EVERY: usize = 32;

struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    /// Constraint rows as first loaded, used to rebuild B^-1 [A | b].
    original: Vec<f64>,
}

impl Tableau {
    fn new(m: usize, width: usize) -> Self {
        Self { m, width, data: vec![0.0; (m + 1) * (width + 1)], original: Vec::new() }
    }

    fn snapshot(&mut self) {
        self.original = self.data[..self.m * (self.width + 1)].to_vec();
    }

    /// Recomputes the constraint rows from the original data for the
    /// current basis by Gauss-Jordan elimination with partial pivoting,
    /// discarding accumulated rounding. Rows may be reassigned among the
    /// basic columns. Leaves the tableau untouched if the basis looks
    /// singular.
    fn reinvert(&mut self, basis: &mut [usize]) {
        let w = self.width + 1;
        let m = self.m;
        let saved = self.data[..m * w].to_vec();
        self.data[..m * w].copy_from_slice(&self.original);
        let mut assigned = vec![false; m];
        let mut new_basis = vec![usize::MAX; m];
        let cols: Vec<usize> = basis.to_vec();
        for &c in &cols {
            let mut best: Option<(usize, f64)> = None;
            for r in (0..m).filter(|&r| !assigned[r]) {
                let a = self.data[r * w + c].abs();
                if best.is_none_or(|(_, b)| a > b) {
                    best = Some((r, a));
                }
            }
            match best {
                Some((r, a)) if a > 1e-12 => {
                    self.pivot_rows(r, c);
                    assigned[r] = true;
                    new_basis[r] = c;
                }
                _ => {
                    self.data[..m * w].copy_from_slice(&saved);
                    return;
                }
            }
        }
        basis.copy_from_slice(&new_basis);
    }

    /// Pivot restricted to the constraint rows.
    fn pivot_rows(&mut self, r: usize, c: usize) {
        let w = self.width + 1;
        let piv = self.data[r * w + c];
        for j in 0..w {
            self.data[r * w + j] /= piv;
        }
        self.data[r * w + c] = 1.0;
        let (head, _) = self.data.split_at_mut(self.m * w);
        let (before, rest) = head.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
                row[c] = 0.0;
            }
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.width + 1) + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * (self.width + 1) + j] = v;
    }

    /// Objective row holds reduced costs c_j - c_B B^-1 A_j and, in the
    /// rhs column, minus the current objective value.
    fn load_objective(&mut self, cost: &[f64], basis: &[usize]) {
        let w = self.width + 1;
        let m = self.m;
        for j in 0..self.width {
            self.data[m * w + j] = cost[j];
        }
        self.data[m * w + self.width] = 0.0;
        for (i, &b) in basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for j in 0..=self.width {
                    self.data[m * w + j] -= cb * self.data[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width + 1;
        let piv = self.data[r * w + c];
        for j in 0..w {
            self.data[r * w + j] /= piv;
        }
        self.data[r * w + c] = 1.0;
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
                row[c] = 0.0;
            }
        }
    }

    /// Row chosen by the minimum-ratio test, ties broken by the smallest
    /// basic index.
    fn ratio_test(&self, enter: usize, basis: &[usize]) -> Option<usize> {
        let rhs = self.width;
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.get(i, enter);
            if a > PIVOT_TOL {
                let ratio = self.get(i, rhs).max(0.0) / a;
                let take = match leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < best - 1e-14 || (ratio <= best + 1e-14 && basis[i] < basis[k])
                    }
                };
                if take {
                    leave = Some((i, ratio));
                }
            }
        }
        leave.map(|(i, _)| i)
    }

    /// Simplex iterations with Bland's rule; only columns below
    /// `enter_limit` may enter the basis.
    fn run(
        &mut self,
        basis: &mut [usize],
        cost: &[f64],
        enter_limit: usize,
        bounded_below: bool,
        iterations: &mut usize,
        limit: usize,
    ) -> Result<PhaseStatus> {
        let m = self.m;
        let mut start = 0;
        let mut since_reinvert = 0usize;
        self.load_objective(cost, basis);
        loop {
            if since_reinvert >= REINVERT_EVERY {
                self.reinvert(basis);
                self.load_objective(cost, basis);
                since_reinvert = 0;
            }
            let candidate = (start..enter_limit).find(|&j| self.get(m, j) < -REDUCED_COST_TOL);
            let pivot_row = candidate.map(|enter| (enter, self.ratio_test(enter, basis)));
            let (enter, row) = match pivot_row {
                Some((enter, Some(row))) => (enter, row),
                Some((enter, None)) if bounded_below => {
                    // Only rounding can leave an improving column without a
                    // pivot when the objective is bounded; skip it.
                    start = enter + 1;
                    continue;
                }
                terminal => {
                    // Confirm the verdict on a freshly factorized basis.
                    if since_reinvert > 0 {
                        since_reinvert = REINVERT_EVERY;
                        start = 0;
                        continue;
                    }
                    return Ok(if terminal.is_none() {
                        PhaseStatus::Optimal
                    } else {
                        PhaseStatus::Unbounded
                    });
                }
            };
            start = 0;
            since_reinvert += 1;
            *iterations += 1;
            if *iterations > limit {
                return Err(Error::IterationLimit { limit });
            }
            self.pivot(row, enter);
            basis[row] = enter;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bounded_variable() {
        let p = LpProblem::new(vec![1.0], Direction::Maximize).with_row(vec![1.0], RowSense::Le, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value.unwrap() - 1.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equality_row() {
        let p = LpProblem::new(vec![1.0, 1.0], Direction::Maximize)
            .with_row(vec![1.0, 1.0], RowSense::Eq, 2.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_row() {
        let p = LpProblem::new(vec![0.0], Direction::Minimize).with_row(vec![1.0], RowSense::Le, -1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        assert!(s.value.is_none());
        assert!((s.infeasibility - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_direction() {
        let p = LpProblem::new(vec![1.0, 0.0], Direction::Maximize)
            .with_row(vec![1.0, -1.0], RowSense::Le, 1.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_bounded_variables() {
        // min x + 2y, x free, -1 <= y <= 3, x + y >= 1, x - y <= 2.
        let mut p = LpProblem::new(vec![1.0, 2.0], Direction::Minimize)
            .with_row(vec![1.0, 1.0], RowSense::Ge, 1.0)
            .with_row(vec![1.0, -1.0], RowSense::Le, 2.0);
        p.lower = vec![f64::NEG_INFINITY, -1.0];
        p.upper = vec![f64::INFINITY, 3.0];
        let s = solve_lp(&p).unwrap();
        // Optimum at y = -1/2, x = 3/2: value 1/2.
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value.unwrap() - 0.5).abs() < 1e-12, "{:?}", s);
        assert!(s.residual < 1e-12);
        // Perturbing rhs of row 0 by e changes the value by 1.5 e.
        assert!((s.duals[0] - 1.5).abs() < 1e-12);
        assert!((s.duals[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_only_variable() {
        // max x with x <= 4 as a bound and no rows.
        let mut p = LpProblem::new(vec![1.0], Direction::Maximize);
        p.lower = vec![f64::NEG_INFINITY];
        p.upper = vec![4.0];
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.value, Some(4.0));
    }

    #[test]
    fn redundant_equalities() {
        let p = LpProblem::new(vec![1.0, 0.0, 0.0], Direction::Maximize)
            .with_row(vec![1.0, 1.0, 1.0], RowSense::Eq, 1.0)
            .with_row(vec![2.0, 2.0, 2.0], RowSense::Eq, 2.0)
            .with_row(vec![0.0, 1.0, 0.0], RowSense::Eq, 0.25);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value.unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let p = LpProblem::new(vec![1.0, 1.0], Direction::Maximize).with_row(vec![1.0], RowSense::Le, 1.0);
        let err = solve_lp(&p).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn nonzero_limit() {
        let p = LpProblem::new(vec![1.0; 3], Direction::Maximize)
            .with_row(vec![1.0; 3], RowSense::Le, 1.0);
        let opts = SolverOptions { max_nonzeros: 2, ..Default::default() };
        assert!(solve_lp_with(&p, opts).is_err());
    }

    #[test]
    fn complementary_slackness_on_degenerate_problem() {
        // Klee-Minty style cube, degenerate at the origin.
        let p = LpProblem::new(vec![100.0, 10.0, 1.0], Direction::Maximize)
            .with_row(vec![1.0, 0.0, 0.0], RowSense::Le, 1.0)
            .with_row(vec![20.0, 1.0, 0.0], RowSense::Le, 100.0)
            .with_row(vec![200.0, 20.0, 1.0], RowSense::Le, 10_000.0)
            .with_row(vec![1.0, 1.0, 1.0], RowSense::Ge, 0.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.value.unwrap() - 10_000.0).abs() < 1e-8);
        for i in 0..p.num_rows() {
            let lhs: f64 = p.matrix[i].iter().zip(&s.x).map(|(a, x)| a * x).sum();
            assert!((s.duals[i] * (lhs - p.rhs[i])).abs() < 1e-7);
        }
        let dual_obj: f64 = s.duals.iter().zip(&p.rhs).map(|(y, b)| y * b).sum();
        assert!((dual_obj - 10_000.0).abs() < 1e-7);
    }

    #[test]
    fn deterministic() {
        let p = LpProblem::new(vec![3.0, 1.0, 2.0], Direction::Maximize)
            .with_row(vec![1.0, 1.0, 3.0], RowSense::Le, 30.0)
            .with_row(vec![2.0, 2.0, 5.0], RowSense::Le, 24.0)
            .with_row(vec![4.0, 1.0, 2.0], RowSense::Le, 36.0);
        let a = solve_lp(&p).unwrap();
        let b = solve_lp(&p).unwrap();
        assert_eq!(a, b);
        assert!((a.value.unwrap() - 28.0).abs() < 1e-12);
    }
}
