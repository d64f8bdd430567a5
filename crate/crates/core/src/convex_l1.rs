//! Least-absolute-deviation fit of one vector by a convex combination of
//! dictionary columns:
//!
//! ```text
//! minimize  1'(e+ + e-)
//! subject   A c - e+ + e- = b,   1'c = 1,   c >= 0,   e+, e- >= 0
//! ```
//!
//! Primal simplex on the linear program above. A basis holds `k` coefficient
//! columns `S`, `k - 1` tight rows `T` (both residual slacks nonbasic), and one
//! residual slack for every other row. Only the `k x k` block of `A` on `T` and
//! `S`, bordered by the convexity row, has to be factored, so the work per pivot
//! is one small LU plus a pricing pass over the dictionary.

use std::fmt;

/// Dense dictionary held both column-major and row-major.
pub(crate) struct Dictionary<'a> {
    data: &'a [f64],
    rows: Vec<f64>,
    nrows: usize,
    ncols: usize,
}

impl<'a> Dictionary<'a> {
    pub(crate) fn new(data: &'a [f64], nrows: usize, ncols: usize) -> Self {
        assert_eq!(data.len(), nrows * ncols);
        let mut rows = vec![0.0; nrows * ncols];
        for j in 0..ncols {
            for r in 0..nrows {
                rows[r * ncols + j] = data[j * nrows + r];
            }
        }
        Dictionary { data, rows, nrows, ncols }
    }

    #[inline]
    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    fn row(&self, r: usize) -> &[f64] {
        &self.rows[r * self.ncols..(r + 1) * self.ncols]
    }
}

/// Dot product with independent partial sums so the loop vectorizes.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    acc.iter().sum::<f64>() + tail
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FitOptions {
    pub max_iter: usize,
    /// Reduced costs above `-opt_tol` count as nonnegative.
    pub opt_tol: f64,
    /// Smallest direction entry accepted as a pivot.
    pub pivot_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: 100_000,
            opt_tol: 1e-10,
            pivot_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Fit {
    /// `(column, weight)` pairs with positive weight, sorted by column.
    pub weights: Vec<(usize, f64)>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum FitError {
    IterationLimit(usize),
    SingularBasis(usize),
    Unbounded(usize),
}

impl FitError {
    pub(crate) fn iterations(&self) -> usize {
        match *self {
            FitError::IterationLimit(n) | FitError::SingularBasis(n) | FitError::Unbounded(n) => n,
        }
    }
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::IterationLimit(n) => write!(f, "iteration limit reached after {n} pivots"),
            FitError::SingularBasis(n) => write!(f, "singular basis at pivot {n}"),
            FitError::Unbounded(n) => write!(f, "unbounded direction at pivot {n}"),
        }
    }
}

/// Dense LU with partial pivoting, row-major.
pub(crate) struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub(crate) fn factor(n: usize, mut a: Vec<f64>) -> Option<Lu> {
        debug_assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best <= 1e-13 * scale {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == 0.0 {
                    continue;
                }
                a[i * n + k] = f;
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        Some(Lu { n, a, perm })
    }

    /// Solves `M x = b`.
    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.a[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.a[i * n + j] * x[j];
            }
            x[i] = s / self.a[i * n + i];
        }
        x
    }

    /// Solves `M' x = b`.
    pub(crate) fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for j in 0..i {
                s -= self.a[j * n + i] * z[j];
            }
            z[i] = s / self.a[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in i + 1..n {
                s -= self.a[j * n + i] * z[j];
            }
            z[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Entering {
    Coef(usize),
    /// Slack of a tight row; `+1` raises the residual (e-), `-1` lowers it (e+).
    Slack { row: usize, sign: i8 },
}

/// Fixed ordering of all variables: coefficients, then the two slacks of each row.
fn slack_index(ncols: usize, row: usize, sign: i8) -> usize {
    ncols + 2 * row + usize::from(sign < 0)
}

impl Entering {
    fn index(self, ncols: usize) -> usize {
        match self {
            Entering::Coef(j) => j,
            Entering::Slack { row, sign } => slack_index(ncols, row, sign),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Leaving {
    Coef(usize),
    Slack(usize),
}

/// Fits `b` with columns of `dict`, never using the columns in `excluded`.
pub(crate) fn fit(dict: &Dictionary<'_>, b: &[f64], excluded: &[usize], opts: &FitOptions) -> Result<Fit, FitError> {
    let (nrows, ncols) = (dict.nrows, dict.ncols);
    assert_eq!(b.len(), nrows);
    let mut allowed = vec![true; ncols];
    for &j in excluded {
        allowed[j] = false;
    }

    // Start from the single nearest column, a vertex with no tight rows.
    let start = (0..ncols)
        .filter(|&j| allowed[j])
        .map(|j| {
            let dist: f64 = dict.col(j).iter().zip(b).map(|(a, b)| (b - a).abs()).sum();
            (j, dist)
        })
        .fold((usize::MAX, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    if start.0 == usize::MAX {
        return Err(FitError::Unbounded(0));
    }

    let mut basis: Vec<usize> = vec![start.0];
    let mut tight: Vec<usize> = Vec::new();
    let mut is_tight = vec![false; nrows];
    let mut in_basis = vec![false; ncols];
    in_basis[start.0] = true;
    let mut sign: Vec<i8> = b
        .iter()
        .zip(dict.col(start.0))
        .map(|(b, a)| if b - a > 0.0 { 1 } else { -1 })
        .collect();

    // `free_sign[r]` is the dual of row `r` when its slack is basic and zero
    // otherwise; `signed[j]` caches `a_j' free_sign` for every column.
    let mut free_sign: Vec<f64> = sign.iter().map(|&s| s as f64).collect();
    let mut signed = vec![0.0; ncols];
    let refresh = |signed: &mut [f64], free_sign: &[f64]| {
        for (j, v) in signed.iter_mut().enumerate() {
            *v = dot(dict.col(j), free_sign);
        }
    };
    refresh(&mut signed, &free_sign);
    let mut since_refresh = 0usize;
    let mut verified = false;

    let mut residual = vec![0.0; nrows];
    let mut direction = vec![0.0; nrows];
    let mut tight_dual = vec![0.0; ncols];
    let mut best_obj = f64::INFINITY;
    let mut stalled = 0usize;
    let mut bland = false;

    for iter in 0..opts.max_iter {
        let k = basis.len();
        debug_assert_eq!(tight.len() + 1, k);

        // Bordered basis block: rows are the tight rows then the convexity row.
        let mut m = vec![0.0; k * k];
        for (p, &r) in tight.iter().enumerate() {
            for (q, &j) in basis.iter().enumerate() {
                m[p * k + q] = dict.col(j)[r];
            }
        }
        for q in 0..k {
            m[(k - 1) * k + q] = 1.0;
        }
        let lu = Lu::factor(k, m).ok_or(FitError::SingularBasis(iter))?;

        // Primal values: tight rows are fitted exactly, weights sum to one.
        let mut rhs: Vec<f64> = tight.iter().map(|&r| b[r]).collect();
        rhs.push(1.0);
        let weights = lu.solve(&rhs);
        residual.copy_from_slice(b);
        for (&j, &w) in basis.iter().zip(&weights) {
            for (res, a) in residual.iter_mut().zip(dict.col(j)) {
                *res -= a * w;
            }
        }
        let objective: f64 = (0..nrows)
            .filter(|&r| !is_tight[r])
            .map(|r| (sign[r] as f64 * residual[r]).max(0.0))
            .sum();

        if objective < best_obj - 1e-13 * (1.0 + best_obj.abs()) {
            best_obj = objective;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > 50 {
                bland = true;
            }
        }

        if since_refresh >= 64 {
            refresh(&mut signed, &free_sign);
            since_refresh = 0;
        }

        // Duals: +-1 on rows with a basic slack, solved on tight rows and the convexity row.
        let g: Vec<f64> = basis.iter().map(|&j| -signed[j]).collect();
        let z = lu.solve_transpose(&g);
        let y0 = z[k - 1];
        tight_dual.fill(y0);
        for (p, &r) in tight.iter().enumerate() {
            let zr = z[p];
            for (t, a) in tight_dual.iter_mut().zip(dict.row(r)) {
                *t += a * zr;
            }
        }

        // Pricing.
        let mut entering: Option<(Entering, f64)> = None;
        let mut consider = |cand: Entering, d: f64| {
            if d >= -opts.opt_tol {
                return;
            }
            let better = match entering {
                None => true,
                Some((cur, _)) if bland => cand.index(ncols) < cur.index(ncols),
                Some((_, best)) => d < best,
            };
            if better {
                entering = Some((cand, d));
            }
        };
        for j in 0..ncols {
            if in_basis[j] || !allowed[j] {
                continue;
            }
            consider(Entering::Coef(j), -(signed[j] + tight_dual[j]));
        }
        for (p, &r) in tight.iter().enumerate() {
            consider(Entering::Slack { row: r, sign: 1 }, 1.0 - z[p]);
            consider(Entering::Slack { row: r, sign: -1 }, 1.0 + z[p]);
        }
        let Some((enter, _)) = entering else {
            if !verified && since_refresh > 0 {
                // Confirm optimality against freshly computed reduced costs.
                refresh(&mut signed, &free_sign);
                since_refresh = 0;
                verified = true;
                continue;
            }
            let mut weights: Vec<(usize, f64)> = basis
                .iter()
                .zip(&weights)
                .map(|(&j, &w)| (j, w.max(0.0)))
                .filter(|&(_, w)| w > 0.0)
                .collect();
            weights.sort_by_key(|&(j, _)| j);
            return Ok(Fit {
                weights,
                objective,
                iterations: iter,
            });
        };
        verified = false;

        // Direction of the basic variables as the entering variable grows.
        let mut col_small = vec![0.0; k];
        match enter {
            Entering::Coef(q) => {
                for (p, &r) in tight.iter().enumerate() {
                    col_small[p] = dict.col(q)[r];
                }
                col_small[k - 1] = 1.0;
            }
            Entering::Slack { row, sign } => {
                let p = tight.iter().position(|&r| r == row).expect("slack of a tight row");
                col_small[p] = sign as f64;
            }
        }
        let w_basis = lu.solve(&col_small);

        let mut best: Option<(Leaving, usize, f64, f64)> = None;
        let mut offer = |leave: Leaving, id: usize, value: f64, w: f64| {
            if w <= opts.pivot_tol {
                return;
            }
            let ratio = value.max(0.0) / w;
            best = match best {
                None => Some((leave, id, ratio, w)),
                Some((_, id0, r0, w0)) => {
                    let tie = (ratio - r0).abs() <= 1e-12 * (1.0 + r0);
                    let better = ratio < r0 - 1e-12 * (1.0 + r0)
                        || (tie && if bland { id < id0 } else { w > w0 });
                    if better { Some((leave, id, ratio, w)) } else { best }
                }
            };
        };
        for (p, (&wv, &val)) in w_basis.iter().zip(&weights).enumerate() {
            offer(Leaving::Coef(p), basis[p], val, wv);
        }
        match enter {
            Entering::Coef(q) => direction.copy_from_slice(dict.col(q)),
            Entering::Slack { .. } => direction.fill(0.0),
        }
        for (&j, &wv) in basis.iter().zip(&w_basis) {
            for (d, a) in direction.iter_mut().zip(dict.col(j)) {
                *d -= a * wv;
            }
        }
        for r in 0..nrows {
            if is_tight[r] {
                continue;
            }
            let w_r = sign[r] as f64 * direction[r];
            offer(Leaving::Slack(r), slack_index(ncols, r, sign[r]), sign[r] as f64 * residual[r], w_r);
        }
        let Some((leave, _, _, _)) = best else {
            return Err(FitError::Unbounded(iter));
        };

        let mut touched: [Option<usize>; 2] = [None, None];
        match (enter, leave) {
            (Entering::Coef(q), Leaving::Coef(p)) => {
                in_basis[basis[p]] = false;
                basis[p] = q;
                in_basis[q] = true;
            }
            (Entering::Coef(q), Leaving::Slack(r)) => {
                basis.push(q);
                in_basis[q] = true;
                tight.push(r);
                is_tight[r] = true;
                touched[0] = Some(r);
            }
            (Entering::Slack { row, sign: s }, Leaving::Coef(p)) => {
                in_basis[basis[p]] = false;
                basis.remove(p);
                let pos = tight.iter().position(|&r| r == row).expect("tight row");
                tight.remove(pos);
                is_tight[row] = false;
                sign[row] = s;
                touched[0] = Some(row);
            }
            (Entering::Slack { row, sign: s }, Leaving::Slack(r)) => {
                let pos = tight.iter().position(|&t| t == row).expect("tight row");
                tight[pos] = r;
                is_tight[r] = true;
                is_tight[row] = false;
                sign[row] = s;
                touched = [Some(row), Some(r)];
            }
        }
        for r in touched.into_iter().flatten() {
            let value = if is_tight[r] { 0.0 } else { sign[r] as f64 };
            let delta = value - free_sign[r];
            if delta != 0.0 {
                free_sign[r] = value;
                for (v, a) in signed.iter_mut().zip(dict.row(r)) {
                    *v += delta * a;
                }
                since_refresh += 1;
            }
        }
    }
    Err(FitError::IterationLimit(opts.max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(cols: &[&[f64]], b: &[f64], excluded: &[usize]) -> Fit {
        let nrows = b.len();
        let data: Vec<f64> = cols.iter().flat_map(|c| c.iter().copied()).collect();
        let dict = Dictionary::new(&data, nrows, cols.len());
        fit(&dict, b, excluded, &FitOptions::default()).unwrap()
    }

    #[test]
    fn lu_solves_both_ways() {
        let m = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let lu = Lu::factor(3, m.clone()).unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = lu.solve(&b);
        for i in 0..3 {
            let s: f64 = (0..3).map(|j| m[i * 3 + j] * x[j]).sum();
            assert!((s - b[i]).abs() < 1e-12);
        }
        let xt = lu.solve_transpose(&b);
        for i in 0..3 {
            let s: f64 = (0..3).map(|j| m[j * 3 + i] * xt[j]).sum();
            assert!((s - b[i]).abs() < 1e-12);
        }
        assert!(Lu::factor(2, vec![1.0, 2.0, 2.0, 4.0]).is_none());
    }

    #[test]
    fn single_candidate_is_forced() {
        let f = run(&[&[1.0, 0.0], &[0.0, 1.0]], &[1.0, 0.0], &[0]);
        assert_eq!(f.weights, vec![(1, 1.0)]);
        assert!((f.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn midpoint_is_reproduced() {
        let f = run(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.5, 0.5], &[]);
        assert!(f.objective < 1e-12);
        assert_eq!(f.weights.len(), 2);
        assert!((f.weights[0].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_duplicate_reaches_zero() {
        let f = run(&[&[0.2, 0.4, 0.0], &[0.2, 0.4, 0.0], &[0.9, 0.0, 0.3]], &[0.2, 0.4, 0.0], &[0]);
        assert!(f.objective < 1e-12);
        assert_eq!(f.weights, vec![(1, 1.0)]);
    }

    #[test]
    fn median_like_fit() {
        // Scalars 0, 1, 3 must combine to approximate 2 in one row plus a second
        // row that penalizes weight on the last column.
        let f = run(&[&[0.0, 0.0], &[1.0, 0.0], &[3.0, 1.0]], &[2.0, 0.0], &[]);
        // c = (0, 1-t, t): row0 residual |2 - 1 - 2t|, row1 |t|; optimum t = 1/2 -> 0.5
        assert!((f.objective - 0.5).abs() < 1e-12, "{}", f.objective);
    }
}
