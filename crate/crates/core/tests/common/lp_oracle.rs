//! Generic two-phase tableau simplex with Bland's rule in exact rational
//! arithmetic.
//!
//! Solves `min c'x  s.t.  A x = b, x >= 0` for small problems. Test-only; shares
//! no code with the library solver.

use num::{BigRational, One, Signed, ToPrimitive, Zero};

type Q = BigRational;

pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

fn q(v: f64) -> Q {
    Q::from_float(v).expect("finite input")
}

fn pivot(t: &mut [Vec<Q>], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v = &*v / &p;
    }
    let prow = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i != row && !r[col].is_zero() {
            let f = r[col].clone();
            for (v, pv) in r.iter_mut().zip(&prow) {
                *v = &*v - &f * pv;
            }
        }
    }
    basis[row] = col;
}

/// Bland's rule: lowest-index improving column, lowest-index leaving variable on ties.
fn run(t: &mut [Vec<Q>], basis: &mut [usize], obj: &[Q], allowed: usize) -> bool {
    let m = t.len();
    let rhs = t[0].len() - 1;
    loop {
        let enter = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut d = obj[j].clone();
            for i in 0..m {
                d -= &obj[basis[i]] * &t[i][j];
            }
            d.is_negative()
        });
        let Some(col) = enter else { return true };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][col].is_positive() {
                let r = &t[i][rhs] / &t[i][col];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => r < *lr || (r == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, r));
                }
            }
        }
        let Some((row, _)) = leave else { return false };
        pivot(t, basis, row, col);
    }
}

pub fn solve_standard_form(a: &[Vec<f64>], b: &[f64], cost: &[f64]) -> Option<LpSolution> {
    let m = a.len();
    let n = cost.len();
    let width = n + m + 1;
    let mut t = vec![vec![Q::zero(); width]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -Q::one() } else { Q::one() };
        for j in 0..n {
            t[i][j] = &flip * q(a[i][j]);
        }
        t[i][n + i] = Q::one();
        t[i][width - 1] = &flip * q(b[i]);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut phase1 = vec![Q::zero(); n + m];
    for v in phase1[n..].iter_mut() {
        *v = Q::one();
    }
    if !run(&mut t, &mut basis, &phase1, n + m) {
        return None;
    }
    if (0..m).any(|i| basis[i] >= n && !t[i][width - 1].is_zero()) {
        return None;
    }
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !basis.contains(&j) && !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
            }
        }
    }
    // Any artificial still basic sits on a redundant row at value zero.
    let mut phase2: Vec<Q> = cost.iter().map(|&c| q(c)).collect();
    phase2.extend(std::iter::repeat(Q::zero()).take(m));
    if !run(&mut t, &mut basis, &phase2, n) {
        return None;
    }
    let mut xq = vec![Q::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            xq[basis[i]] = t[i][width - 1].clone();
        }
    }
    let objective: Q = xq.iter().zip(cost).map(|(x, &c)| x * q(c)).sum();
    Some(LpSolution {
        x: xq.iter().map(|v| v.to_f64().unwrap()).collect(),
        objective: objective.to_f64().unwrap(),
    })
}

/// Optimal L1 residual of fitting column `i` by a convex combination of the
/// other columns, via the split-residual LP.
pub fn self_expressive_optimum(cols: &[Vec<f64>], i: usize) -> f64 {
    let d = cols[0].len();
    let others: Vec<usize> = (0..cols.len()).filter(|&j| j != i).collect();
    let n = others.len() + 2 * d;
    let mut a = vec![vec![0.0; n]; d + 1];
    let mut b = vec![0.0; d + 1];
    for r in 0..d {
        for (k, &j) in others.iter().enumerate() {
            a[r][k] = cols[j][r];
        }
        a[r][others.len() + r] = -1.0;
        a[r][others.len() + d + r] = 1.0;
        b[r] = cols[i][r];
    }
    for k in 0..others.len() {
        a[d][k] = 1.0;
    }
    b[d] = 1.0;
    let mut cost = vec![0.0; n];
    for v in cost[others.len()..].iter_mut() {
        *v = 1.0;
    }
    solve_standard_form(&a, &b, &cost).expect("feasible bounded LP").objective
}
