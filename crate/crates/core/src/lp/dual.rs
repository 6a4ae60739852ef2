//! Dual form of the extreme-probability programs over a discrete mixing
//! distribution.
//!
//! The primal problems are `sup / inf b'pi` subject to `G pi = r`,
//! `1'pi = 1`, `pi >= 0`, with `G` a K x L matrix. Their duals are stated
//! in terms of `A = [G' - 1 r', -1]`, an L x (K + 1) matrix:
//!
//! * upper value: `inf [0, 1] v` subject to `A v <= -b`
//! * lower value: `sup [0, -1] v` subject to `A v <= b`
//!
//! An infeasible primal leaves the dual unbounded, so the upper value is
//! `-inf` and the lower value is `+inf`.

use serde::Serialize;

use super::{solve_lp, Direction, LpProblem, LpStatus, RowSense};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DualForm {
    /// Dual of the supremum: yields the upper value.
    Inf,
    /// Dual of the infimum: yields the lower value.
    Sup,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualizedProgram {
    /// L x (K + 1), row-major.
    pub a: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    /// Objective coefficients over v.
    pub objective: Vec<f64>,
    pub form: DualForm,
}

/// Dual of `sup b'pi` (the upper value).
pub fn dualize_sup(g: &[Vec<f64>], r: &[f64], b: &[f64]) -> Result<DualizedProgram> {
    dualize(g, r, b, DualForm::Inf)
}

pub fn dualize(g: &[Vec<f64>], r: &[f64], b: &[f64], form: DualForm) -> Result<DualizedProgram> {
    let k = g.len();
    let l = b.len();
    if r.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "G has {k} rows but r has {} entries",
            r.len()
        )));
    }
    if let Some(row) = g.iter().position(|row| row.len() != l) {
        return Err(Error::DimensionMismatch(format!(
            "G row {row} has {} columns, b has {l} entries",
            g[row].len()
        )));
    }
    let a: Vec<Vec<f64>> = (0..l)
        .map(|col| {
            let mut row: Vec<f64> = (0..k).map(|i| g[i][col] - r[i]).collect();
            row.push(-1.0);
            row
        })
        .collect();
    let mut objective = vec![0.0; k + 1];
    let rhs = match form {
        DualForm::Inf => {
            objective[k] = 1.0;
            b.iter().map(|x| -x).collect()
        }
        DualForm::Sup => {
            objective[k] = -1.0;
            b.to_vec()
        }
    };
    Ok(DualizedProgram { a, rhs, objective, form })
}

impl DualizedProgram {
    pub fn to_lp(&self) -> LpProblem {
        let n = self.objective.len();
        LpProblem {
            objective: self.objective.clone(),
            matrix: self.a.clone(),
            senses: vec![RowSense::Le; self.a.len()],
            rhs: self.rhs.clone(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
            direction: match self.form {
                DualForm::Inf => Direction::Minimize,
                DualForm::Sup => Direction::Maximize,
            },
        }
    }

    /// Multiplier columns that are linear combinations of earlier ones.
    ///
    /// When the columns of G and r are probability vectors the rows of
    /// `G' - 1 r'` sum to zero, so the multipliers have a null direction
    /// along which a simplex path can drift to huge, cancelling values.
    /// Fixing dependent multipliers at zero removes it without changing
    /// the optimal value, since any solution can be shifted along the null
    /// space.
    pub fn dependent_multipliers(&self) -> Vec<usize> {
        let k = self.objective.len() - 1;
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut dependent = Vec::new();
        for j in 0..k {
            let mut v: Vec<f64> = self.a.iter().map(|row| row[j]).collect();
            let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            // Two passes of Gram-Schmidt for stability.
            for _ in 0..2 {
                for q in &basis {
                    let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, qi)| *x -= d * qi);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= 1e-10 * norm0.max(1e-300) {
                dependent.push(j);
            } else {
                basis.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        dependent
    }

    /// Program with dependent multipliers removed; see
    /// [`DualizedProgram::dependent_multipliers`].
    pub fn to_reduced_lp(&self) -> LpProblem {
        let drop = self.dependent_multipliers();
        let keep: Vec<usize> = (0..self.objective.len()).filter(|j| !drop.contains(j)).collect();
        let mut lp = self.to_lp();
        lp.objective = keep.iter().map(|&j| self.objective[j]).collect();
        lp.matrix = self.a.iter().map(|row| keep.iter().map(|&j| row[j]).collect()).collect();
        lp.lower = vec![f64::NEG_INFINITY; keep.len()];
        lp.upper = vec![f64::INFINITY; keep.len()];
        lp
    }

    /// Optimal value, with an unbounded dual mapped to the infinite value
    /// of the infeasible primal.
    pub fn value(&self) -> Result<f64> {
        let sol = solve_lp(&self.to_reduced_lp())?;
        match (sol.status, self.form) {
            (LpStatus::Optimal, _) => Ok(sol.value.expect("optimal value")),
            (LpStatus::Unbounded, DualForm::Inf) => Ok(f64::NEG_INFINITY),
            (LpStatus::Unbounded, DualForm::Sup) => Ok(f64::INFINITY),
            (LpStatus::Infeasible, _) => Err(Error::Numerical(
                "dual program reported infeasible; it is feasible by construction".into(),
            )),
        }
    }
}

/// Primal program `sup / inf b'pi` over the constrained simplex.
pub fn primal_program(g: &[Vec<f64>], r: &[f64], b: &[f64], direction: Direction) -> LpProblem {
    let mut p = LpProblem::new(b.to_vec(), direction);
    for (row, &ri) in g.iter().zip(r) {
        p = p.with_row(row.clone(), RowSense::Eq, ri);
    }
    p.with_row(vec![1.0; b.len()], RowSense::Eq, 1.0)
}
