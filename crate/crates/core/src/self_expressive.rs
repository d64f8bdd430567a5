//! Self-expressive model: every map is approximated by a convex combination of
//! the other maps under the L1 norm. The residual of that fit is the map's
//! irregularity, and the largest residuals mark candidate outliers.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex_l1::{self, Dictionary, FitOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Allowed violation of nonnegativity, unit column sums and zero diagonal.
    pub tol_feas: f64,
    /// Relative objective tolerance.
    pub tol_obj: f64,
    /// Pivot limit per column.
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_feas: 1e-8,
            tol_obj: 1e-6,
            max_iter: 100_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_feas > 0.0 && self.tol_obj > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidArgument(format!(
                "solver tolerances and iteration limit must be positive: {self:?}"
            )));
        }
        Ok(())
    }

    fn fit_options(&self) -> FitOptions {
        FitOptions {
            max_iter: self.max_iter,
            // reduced-cost tolerance well inside the requested objective accuracy
            opt_tol: (self.tol_obj * 1e-4).min(1e-9),
            pivot_tol: 1e-9,
        }
    }
}

/// `m x m` self-expressive code; column `i` reconstructs map `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    entries: DMatrix<f64>,
}

/// Largest violation of each feasibility constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub min_entry: f64,
    pub max_column_sum_error: f64,
    pub max_abs_diagonal: f64,
}

impl FeasibilityReport {
    pub fn worst(&self) -> f64 {
        (-self.min_entry).max(0.0).max(self.max_column_sum_error).max(self.max_abs_diagonal)
    }
}

impl CoefficientMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient matrix is {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(CoefficientMatrix { entries })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.ncols() == 0
    }

    pub fn feasibility(&self) -> FeasibilityReport {
        let e = &self.entries;
        FeasibilityReport {
            min_entry: e.iter().copied().fold(f64::INFINITY, f64::min),
            max_column_sum_error: e
                .column_iter()
                .map(|c| (c.sum() - 1.0).abs())
                .fold(0.0, f64::max),
            max_abs_diagonal: e.diagonal().iter().map(|v| v.abs()).fold(0.0, f64::max),
        }
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.feasibility().worst() <= tol
    }
}

/// Solves the convex L1 self-expressive program column by column.
///
/// Columns are independent and solved in parallel; each solve is
/// deterministic, so the assembled matrix does not depend on scheduling.
pub fn solve_coefficients(x: &DMatrix<f64>, cfg: &SolverConfig) -> Result<CoefficientMatrix> {
    cfg.validate()?;
    let m = x.ncols();
    if m < 2 {
        return Err(Error::InsufficientData(format!("{m} maps, at least 2 required")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("data matrix has non-finite entries".into()));
    }
    // Rows that are zero in every map contribute nothing to any residual.
    let rows: Vec<usize> = (0..x.nrows()).filter(|&r| x.row(r).iter().any(|&v| v != 0.0)).collect();
    let nrows = rows.len().max(1);
    let mut packed = Vec::with_capacity(nrows * m);
    for j in 0..m {
        if rows.is_empty() {
            packed.push(0.0);
        } else {
            packed.extend(rows.iter().map(|&r| x[(r, j)]));
        }
    }
    let dict = Dictionary::new(&packed, nrows, m);
    let opts = cfg.fit_options();

    let columns: Vec<Vec<(usize, f64)>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let b = &packed[i * nrows..(i + 1) * nrows];
            convex_l1::fit(&dict, b, &[i], &opts)
                .map(|f| f.weights)
                .map_err(|e| Error::SolverFailure {
                    column: i,
                    iterations: e.iterations(),
                })
        })
        .collect::<Result<_>>()?;

    let mut c = DMatrix::zeros(m, m);
    for (i, weights) in columns.iter().enumerate() {
        let total: f64 = weights.iter().map(|w| w.1).sum();
        for &(j, w) in weights {
            c[(j, i)] = w / total;
        }
    }
    Ok(CoefficientMatrix { entries: c })
}

/// Per-map L1 reconstruction residuals and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrregularityVector {
    pub values: Vec<f64>,
    pub global: f64,
}

impl IrregularityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("irregularities must be finite and nonnegative".into()));
        }
        let global = values.iter().sum();
        Ok(IrregularityVector { values, global })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `values[i] = |x_i - X c_i|_1`.
pub fn irregularity(x: &DMatrix<f64>, c: &CoefficientMatrix) -> Result<IrregularityVector> {
    let ce = c.entries();
    if ce.nrows() != x.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "data has {} maps, coefficients are {}x{}",
            x.ncols(),
            ce.nrows(),
            ce.ncols()
        )));
    }
    let recon = x * ce;
    let values = (0..x.ncols())
        .map(|i| (x.column(i) - recon.column(i)).iter().map(|v| v.abs()).sum())
        .collect();
    IrregularityVector::new(values)
}

/// Partition into regular and irregular maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularSplit {
    /// Ascending indices of regular maps.
    pub regular_idx: Vec<usize>,
    /// Ascending indices of irregular maps.
    pub irregular_idx: Vec<usize>,
    pub p: f64,
    /// Smallest irregularity flagged irregular; `+inf` when none are.
    pub implied_threshold: f64,
}

/// Flags the `round(p * m)` most irregular maps.
///
/// Ties in irregularity flag the larger index first.
pub fn split_regular(irr: &IrregularityVector, p: f64) -> Result<RegularSplit> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1)")));
    }
    let m = irr.len();
    let n_irr = ((p * m as f64).round() as usize).min(m);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| irr.values[b].total_cmp(&irr.values[a]).then(b.cmp(&a)));
    let mut irregular_idx = order[..n_irr].to_vec();
    let mut regular_idx = order[n_irr..].to_vec();
    irregular_idx.sort_unstable();
    regular_idx.sort_unstable();
    let implied_threshold = irregular_idx
        .iter()
        .map(|&i| irr.values[i])
        .fold(f64::INFINITY, f64::min);
    Ok(RegularSplit {
        regular_idx,
        irregular_idx,
        p,
        implied_threshold,
    })
}
