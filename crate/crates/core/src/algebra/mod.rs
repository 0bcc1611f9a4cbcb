//! Exact arithmetic over the rationals in the indeterminates `sigma_ij` and
//! `lambda_ij`: sparse polynomials, rational functions without gcd
//! reduction, and fraction-free linear solving.

mod linsolve;
mod poly;
mod ratfn;

use thiserror::Error;

pub use linsolve::{bareiss_determinant, gauss_solve_ratfn, solve_poly_system};
pub use poly::{canonicalize_constraint, Indeterminate, Kind, Monomial, Poly, PolyJson, TermJson};
pub use ratfn::RatFn;

/// Default refusal threshold for intermediate polynomial sizes.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("no value assigned to {0}")]
    MissingAssignment(Indeterminate),
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("linear system is symbolically singular")]
    Singular,
    #[error("polynomial size cap exceeded: {terms} terms (limit {limit})")]
    TermCap { limit: usize, terms: usize },
    #[error("the zero polynomial has no canonical form")]
    ZeroPolynomial,
    #[error("constraint contains non-covariance indeterminate {0}")]
    NotPureSigma(Indeterminate),
}
