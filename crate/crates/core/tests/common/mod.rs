//! Brute-force oracles and instance generators shared by the integration
//! tests.

#![allow(dead_code)]

use rand::Rng;
use rayon::prelude::*;

/// Random K x L matrix with entries in [0, 1], a strictly interior mixing
/// vector and the implied moment targets `r = G pi0`.
pub fn random_instance<R: Rng>(rng: &mut R, k: usize, l: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let g: Vec<Vec<f64>> = (0..k).map(|_| (0..l).map(|_| rng.random::<f64>()).collect()).collect();
    let raw: Vec<f64> = (0..l).map(|_| 0.2 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let pi0: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let r = g.iter().map(|row| row.iter().zip(&pi0).map(|(a, p)| a * p).sum()).collect();
    let b = (0..l).map(|_| rng.random::<f64>()).collect();
    (g, r, b)
}

/// Solves the square system `m x = y` by Gaussian elimination with partial
/// pivoting; `None` when singular.
pub fn solve_square(mut m: Vec<Vec<f64>>, mut y: Vec<f64>) -> Option<Vec<f64>> {
    let n = y.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, p);
        y.swap(c, p);
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                m[i][j] -= f * m[c][j];
            }
            y[i] -= f * y[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (y[i] - s) / m[i][i];
    }
    Some(x)
}

fn determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            return 0.0;
        };
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    det
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Maximum of `score` over the simplex grid with spacing `1 / steps` in the
/// free coordinates, the remaining coordinates being fixed by the `eq`
/// equalities `(coefficients, rhs)`. Points that violate nonnegativity or
/// for which `score` returns `None` are skipped.
///
/// The dependent coordinates are the best-conditioned block of
/// `eq.len()` columns, so every visited point satisfies the equalities to
/// rounding error.
pub fn simplex_slice_grid_max<F>(l: usize, eq: &[(Vec<f64>, f64)], steps: usize, score: F) -> Option<f64>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    let n_eq = eq.len();
    assert!((1..=l).contains(&n_eq) && l <= 16);
    let block_of = |cols: &[usize]| -> Vec<Vec<f64>> {
        eq.iter().map(|(row, _)| cols.iter().map(|&j| row[j]).collect()).collect()
    };
    let dep = combinations(l, n_eq)
        .into_iter()
        .max_by(|a, b| determinant(&block_of(a)).abs().total_cmp(&determinant(&block_of(b)).abs()))
        .expect("at least one block");
    let free: Vec<usize> = (0..l).filter(|j| !dep.contains(j)).collect();
    let block = block_of(&dep);
    // Columns of the inverse, so each point costs one small product.
    let inv: Vec<Vec<f64>> = (0..n_eq)
        .map(|c| {
            let e: Vec<f64> = (0..n_eq).map(|i| f64::from(u8::from(i == c))).collect();
            solve_square(block.clone(), e).expect("nonsingular block")
        })
        .collect();
    let h = 1.0 / steps as f64;

    let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..free.len().saturating_sub(1) {
        prefixes = prefixes
            .into_iter()
            .flat_map(|p| {
                let used: usize = p.iter().sum();
                (0..=steps - used).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    prefixes
        .par_iter()
        .map(|prefix| {
            let used: usize = prefix.iter().sum();
            let last_max = if free.is_empty() { 0 } else { steps - used };
            let mut x = [0.0f64; 16];
            let mut best: Option<f64> = None;
            for (slot, &j) in free.iter().enumerate().take(prefix.len()) {
                x[j] = prefix[slot] as f64 * h;
            }
            for last in 0..=last_max {
                if let Some(&j) = free.get(prefix.len()) {
                    x[j] = last as f64 * h;
                }
                let mut rhs = [0.0f64; 16];
                for (i, (row, c)) in eq.iter().enumerate() {
                    rhs[i] = c - free.iter().map(|&j| row[j] * x[j]).sum::<f64>();
                }
                let mut ok = true;
                for (k, &j) in dep.iter().enumerate() {
                    let v: f64 = (0..n_eq).map(|i| inv[i][k] * rhs[i]).sum();
                    if v < -1e-12 {
                        ok = false;
                        break;
                    }
                    x[j] = v.max(0.0);
                }
                if !ok {
                    continue;
                }
                if let Some(v) = score(&x[..l]) {
                    best = Some(best.map_or(v, |b: f64| b.max(v)));
                }
            }
            best
        })
        .reduce(|| None, |a, b| match (a, b) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, None) => a,
            (None, b) => b,
        })
}

/// Maximum of `b' pi` over the simplex grid subject to `G pi = r`.
pub fn lp_grid_max(g: &[Vec<f64>], r: &[f64], b: &[f64], steps: usize) -> Option<f64> {
    let l = b.len();
    let mut eq: Vec<(Vec<f64>, f64)> = g.iter().cloned().zip(r.iter().copied()).collect();
    eq.push((vec![1.0; l], 1.0));
    simplex_slice_grid_max(l, &eq, steps, |x| Some(x.iter().zip(b).map(|(a, c)| a * c).sum()))
}

/// KL divergence of `q` from `w`, with 0 log 0 = 0.
pub fn kl(q: &[f64], w: &[f64]) -> f64 {
    q.iter().zip(w).map(|(q, w)| if *q <= 0.0 { 0.0 } else { q * (q / w).ln() }).sum()
}

/// Maximum of `b' q` over the simplex grid intersected with the KL ball of
/// radius `delta` around `w` and the moment equalities `G q = r`.
pub fn kl_grid_max(w: &[f64], b: &[f64], g: &[Vec<f64>], r: &[f64], delta: f64, steps: usize) -> Option<f64> {
    let l = w.len();
    let mut eq: Vec<(Vec<f64>, f64)> = g.iter().cloned().zip(r.iter().copied()).collect();
    eq.push((vec![1.0; l], 1.0));
    simplex_slice_grid_max(l, &eq, steps, |q| {
        (kl(q, w) <= delta).then(|| q.iter().zip(b).map(|(a, c)| a * c).sum())
    })
}

/// Maximum of `b' q` over the full simplex grid of spacing `1 / steps`
/// inside the KL ball of radius `delta` around `w` (no moment
/// restrictions). Uses tabulated `q log q` so the 3-simplex at mesh 1e-3 is
/// cheap.
pub fn kl_simplex_grid_max(w: &[f64], b: &[f64], delta: f64, steps: usize) -> f64 {
    let h = 1.0 / steps as f64;
    let qlogq: Vec<f64> = (0..=steps).map(|k| if k == 0 { 0.0 } else { k as f64 * h * (k as f64 * h).ln() }).collect();
    let log_w: Vec<f64> = w.iter().map(|x| x.ln()).collect();

    fn walk(
        i: usize,
        left: usize,
        kl_acc: f64,
        val_acc: f64,
        ctx: &(&[f64], &[f64], &[f64], f64, f64),
        best: &mut f64,
    ) {
        let (qlogq, log_w, b, delta, h) = *ctx;
        let l = b.len();
        if i == l - 1 {
            let q = left as f64 * h;
            let kl = kl_acc + qlogq[left] - q * log_w[i];
            if kl <= delta {
                *best = best.max(val_acc + q * b[i]);
            }
            return;
        }
        for k in 0..=left {
            let q = k as f64 * h;
            walk(i + 1, left - k, kl_acc + qlogq[k] - q * log_w[i], val_acc + q * b[i], ctx, best);
        }
    }

    let mut best = f64::NEG_INFINITY;
    walk(0, steps, 0.0, 0.0, &(&qlogq, &log_w, b, delta, h), &mut best);
    best
}
