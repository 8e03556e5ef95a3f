//! Truncated-SVD least squares for dense complex systems.

use std::io::{self, Write};

use faer::{Col, Mat, MatRef};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix has no rows or no columns ({rows}x{cols})")]
    Empty { rows: usize, cols: usize },
    #[error("right-hand side has length {got}, expected {expected}")]
    RhsLength { got: usize, expected: usize },
    #[error("truncation tolerance {0} must lie in (0, 1)")]
    Tolerance(f64),
    #[error("SVD failed to converge")]
    NoConvergence,
}

/// Diagnostics of one truncated-SVD solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsvdReport {
    /// All `min(rows, cols)` singular values, non-increasing.
    pub singular_values: Vec<f64>,
    /// Number of singular values kept, `σ_i >= ε σ_max`.
    pub rank_eps: usize,
    /// `σ_max / σ_min` over the full spectrum (infinite when `σ_min = 0`).
    pub cond: f64,
    pub residual_norm: f64,
    pub solution_norm: f64,
    pub tolerance: f64,
    pub rows: usize,
    pub cols: usize,
}

impl TsvdReport {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Minimum-norm least-squares solution of `A a = b` restricted to the
/// singular directions with `σ_i >= ε σ_max`.
///
/// Tall systems are first reduced with a Householder QR of `[A | b]`, which
/// yields `R` and `Qᴴ b` in one pass; the SVD is then taken of the square `R`.
pub fn tsvd_solve(
    a: MatRef<'_, Complex64>,
    b: &[Complex64],
    eps: f64,
) -> Result<(Vec<Complex64>, TsvdReport), LinalgError> {
    let (rows, cols) = (a.nrows(), a.ncols());
    if rows == 0 || cols == 0 {
        return Err(LinalgError::Empty { rows, cols });
    }
    if b.len() != rows {
        return Err(LinalgError::RhsLength { got: b.len(), expected: rows });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LinalgError::Tolerance(eps));
    }

    let (core, rhs) = if rows > cols {
        let mut aug = Mat::<Complex64>::zeros(rows, cols + 1);
        aug.as_mut().submatrix_mut(0, 0, rows, cols).copy_from(a);
        for (i, v) in b.iter().enumerate() {
            aug[(i, cols)] = *v;
        }
        let r = aug.qr().thin_R().to_owned();
        drop(aug);
        let core = r.as_ref().submatrix(0, 0, cols, cols).to_owned();
        let rhs = Col::from_fn(cols, |i| r[(i, cols)]);
        (core, rhs)
    } else {
        (a.to_owned(), Col::from_fn(rows, |i| b[i]))
    };

    let svd = core.thin_svd().map_err(|_| LinalgError::NoConvergence)?;
    let sigma: Vec<f64> = svd.S().column_vector().iter().map(|s| s.re).collect();
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let sigma_min = sigma.iter().copied().fold(f64::INFINITY, f64::min);

    let mut coefficients = vec![Complex64::new(0.0, 0.0); cols];
    let mut rank = 0;
    if sigma_max > 0.0 {
        let threshold = eps * sigma_max;
        let projected = svd.U().adjoint() * &rhs;
        let weights = Col::from_fn(sigma.len(), |i| {
            if sigma[i] >= threshold {
                projected[i] / sigma[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        rank = sigma.iter().filter(|&&s| s >= threshold).count();
        let solution = svd.V() * &weights;
        for (c, v) in coefficients.iter_mut().zip(solution.iter()) {
            *c = *v;
        }
    }

    let fitted = a * Col::from_fn(cols, |i| coefficients[i]);
    let residual: Vec<Complex64> = fitted.iter().zip(b).map(|(f, y)| f - y).collect();

    let mut singular_values = sigma;
    singular_values.sort_by(|x, y| y.total_cmp(x));
    let cond = if sigma_min > 0.0 { sigma_max / sigma_min } else { f64::INFINITY };
    let report = TsvdReport {
        singular_values,
        rank_eps: rank,
        cond,
        residual_norm: norm(&residual),
        solution_norm: norm(&coefficients),
        tolerance: eps,
        rows,
        cols,
    };
    Ok((coefficients, report))
}

/// Number of normalized singular values `σ_i / σ_max` strictly inside `(ε, 1 - ε)`.
pub fn plunge_region_size(report: &TsvdReport, eps: f64) -> usize {
    let smax = report.sigma_max();
    if smax <= 0.0 {
        return 0;
    }
    report
        .singular_values
        .iter()
        .map(|s| s / smax)
        .filter(|&s| s > eps && s < 1.0 - eps)
        .count()
}

/// Writes the spectrum as CSV `i,sigma_raw,sigma_normalized` (1-based `i`).
pub fn write_spectrum_csv<W: Write>(mut out: W, report: &TsvdReport) -> io::Result<()> {
    writeln!(out, "i,sigma_raw,sigma_normalized")?;
    let smax = report.sigma_max();
    for (i, s) in report.singular_values.iter().enumerate() {
        let normalized = if smax > 0.0 { s / smax } else { 0.0 };
        writeln!(out, "{},{:.16e},{:.16e}", i + 1, s, normalized)?;
    }
    Ok(())
}
