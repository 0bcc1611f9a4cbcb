//! Parameter recovery from a covariance matrix along a certificate.
//!
//! For vertex `v` with `S_v = {s_1..s_k}` and `pa(v) = {p_1..p_k}`, row `i`
//! of the solved system comes from `s_i`:
//!
//! * if `s_i` precedes `v`, the row is `a_{s_i x} = sigma_{s_i x} - sum_l
//!   lambda_{l s_i} sigma_{l x}`, which uses the already recovered column of
//!   `s_i`;
//! * otherwise `s_i` is not half-trek reachable from `v` and the plain
//!   covariance row `sigma_{s_i x}` is used.
//!
//! Both rows vanish against column `v` of `I - Lambda`, so each gives one
//! linear equation in `lambda_{p v}`.

mod numeric;
mod symbolic;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::graph::MixedGraph;
use crate::identify::CertificateError;
use crate::model::CovMatrix;

pub use numeric::{recover_lambda_numeric, recover_omega, recover_params, PIVOT_TOLERANCE};
pub use symbolic::{recover_lambda_symbolic, SymbolicLambda, MAX_SYMBOLIC_VERTICES};

/// Known coefficients keyed by edge `(from, to)`.
pub type PartialLambda = BTreeMap<(usize, usize), f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecoveryError {
    #[error("coefficient lambda_{0}_{1} is required but not yet known")]
    MissingCoefficient(usize, usize),
    #[error("covariance matrix is {got}x{got}, graph has {want} vertices")]
    Dimension { got: usize, want: usize },
    #[error("linear system for vertex {v} is numerically singular")]
    Degenerate { v: usize },
    #[error("symbolic system for vertex {v} is singular, so the certificate is wrong")]
    SymbolicSingular { v: usize },
    #[error("symbolic recovery is limited to {limit} vertices, graph has {n}")]
    TooManyVertices { n: usize, limit: usize },
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn lookup(lambda: &PartialLambda, from: usize, to: usize) -> Result<f64, RecoveryError> {
    lambda.get(&(from, to)).copied().ok_or(RecoveryError::MissingCoefficient(from, to))
}

/// `a_{ij} = sigma_{ij} - sum_{l in pa(i)} lambda_{li} sigma_{lj}`.
pub fn a_entry(
    g: &MixedGraph,
    sigma: &CovMatrix,
    lambda: &PartialLambda,
    i: usize,
    j: usize,
) -> Result<f64, RecoveryError> {
    let mut acc = sigma.get(i, j);
    for &l in g.parents(i) {
        acc -= lookup(lambda, l, i)? * sigma.get(l, j);
    }
    Ok(acc)
}

/// `b_{ij} = a_{ij} - sum_{k in pa(j)} lambda_{kj} a_{ik}`, the `(i, j)` entry
/// of `(I - Lambda)^T Sigma (I - Lambda)`.
pub fn b_entry(
    g: &MixedGraph,
    sigma: &CovMatrix,
    lambda: &PartialLambda,
    i: usize,
    j: usize,
) -> Result<f64, RecoveryError> {
    let mut acc = a_entry(g, sigma, lambda, i, j)?;
    for &k in g.parents(j) {
        acc -= lookup(lambda, k, j)? * a_entry(g, sigma, lambda, i, k)?;
    }
    Ok(acc)
}

fn check_dimension(g: &MixedGraph, sigma: &CovMatrix) -> Result<(), RecoveryError> {
    if sigma.n() != g.n() || sigma.sigma.ncols() != g.n() {
        return Err(RecoveryError::Dimension { got: sigma.n(), want: g.n() });
    }
    Ok(())
}

/// Whether row `s` of the system for `v` is an `a`-row.
fn uses_a_row(rank: &[usize], s: usize, v: usize) -> bool {
    rank[s - 1] < rank[v - 1]
}
