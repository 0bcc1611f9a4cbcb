//! Text formats for covariance and parameter matrices.
//!
//! A matrix file has one row per line with comma-separated decimal entries.
//! Blank lines and lines starting with `#` are skipped. Floats are written with
//! Rust's shortest round-trip formatting, so save-then-load is exact.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::model::CovMatrix;

/// Largest accepted `|sigma_ij - sigma_ji|`, relative to `max(1, |sigma_ij|)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not symmetric at ({i}, {j}): difference {diff:e}")]
    Asymmetric { i: usize, j: usize, diff: f64 },
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>, MatrixError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|field| {
                let field = field.trim();
                match field.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(MatrixError::Parse { line: k + 1, message: format!("invalid number {field:?}") }),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(MatrixError::Empty);
    }
    if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(MatrixError::NotSquare { rows: n, row: row + 1, cols: r.len() });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Parses, checks symmetry, symmetrizes, and checks positive definiteness.
pub fn parse_covariance(text: &str) -> Result<CovMatrix, MatrixError> {
    let m = parse_matrix(text)?;
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            let diff = (a - b).abs();
            if diff > SYMMETRY_TOLERANCE * a.abs().max(b.abs()).max(1.0) {
                return Err(MatrixError::Asymmetric { i: i + 1, j: j + 1, diff });
            }
        }
    }
    let cov = CovMatrix { sigma: (&m + m.transpose()) * 0.5 };
    if !cov.is_positive_definite() {
        return Err(MatrixError::NotPositiveDefinite);
    }
    Ok(cov)
}

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Row-major nested vectors, for JSON output.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}
