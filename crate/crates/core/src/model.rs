//! Numeric model parameters, covariance simulation and random instances.

use nalgebra::{DMatrix, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::graph::MixedGraph;
use crate::trek::{all_treks, TrekError};

/// Largest accepted condition number of `I - Lambda`.
pub const MAX_CONDITION: f64 = 1e12;
/// Spectral radius cap applied to sampled coefficients on cyclic graphs.
pub const SPECTRAL_RADIUS_CAP: f64 = 0.8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("matrix is {got}x{got}, expected {want}x{want}")]
    Dimension { got: usize, want: usize },
    #[error("lambda_{0}_{1} is nonzero but {0} -> {1} is not an edge")]
    LambdaSupport(usize, usize),
    #[error("omega_{0}_{1} is nonzero but {0} <-> {1} is not an edge")]
    OmegaSupport(usize, usize),
    #[error("omega is not symmetric at ({0}, {1})")]
    OmegaAsymmetric(usize, usize),
    #[error("I - Lambda is singular or ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("omega is not positive definite")]
    OmegaNotPd,
    #[error("the resulting covariance matrix is not positive definite")]
    SigmaNotPd,
    #[error(transparent)]
    Trek(#[from] TrekError),
}

/// `(Lambda, Omega)` with 0-indexed storage: `lambda[(i-1, j-1)]` is the
/// coefficient of the edge `i -> j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPair {
    pub lambda: DMatrix<f64>,
    pub omega: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    pub sigma: DMatrix<f64>,
}

impl CovMatrix {
    pub fn n(&self) -> usize {
        self.sigma.nrows()
    }

    /// `sigma_{ij}` with 1-based indices.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sigma[(i - 1, j - 1)]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.sigma.clone().cholesky().is_some()
    }
}

impl ParamPair {
    /// Checks shapes and that the supports lie inside the graph's edge sets.
    pub fn validate(&self, g: &MixedGraph) -> Result<(), ModelError> {
        let n = g.n();
        for m in [&self.lambda, &self.omega] {
            if m.nrows() != n || m.ncols() != n {
                return Err(ModelError::Dimension { got: m.nrows().max(m.ncols()), want: n });
            }
        }
        for i in 1..=n {
            for j in 1..=n {
                if self.lambda[(i - 1, j - 1)] != 0.0 && !g.has_directed(i, j) {
                    return Err(ModelError::LambdaSupport(i, j));
                }
                if i < j {
                    let (a, b) = (self.omega[(i - 1, j - 1)], self.omega[(j - 1, i - 1)]);
                    if a != b {
                        return Err(ModelError::OmegaAsymmetric(i, j));
                    }
                    if a != 0.0 && !g.has_bidirected(i, j) {
                        return Err(ModelError::OmegaSupport(i, j));
                    }
                }
            }
        }
        Ok(())
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// `Sigma = (I - Lambda)^{-T} Omega (I - Lambda)^{-1}`.
pub fn simulate_sigma(g: &MixedGraph, params: &ParamPair) -> Result<CovMatrix, ModelError> {
    params.validate(g)?;
    if params.omega.clone().cholesky().is_none() {
        return Err(ModelError::OmegaNotPd);
    }
    let n = g.n();
    let m = DMatrix::<f64>::identity(n, n) - &params.lambda;
    let sv = m.singular_values();
    let (max, min) = (sv.max(), sv.min());
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(cond < MAX_CONDITION) {
        return Err(ModelError::IllConditioned(cond));
    }
    let inv = m.try_inverse().ok_or(ModelError::IllConditioned(f64::INFINITY))?;
    let sigma = symmetrize(&(inv.transpose() * &params.omega * inv));
    let cov = CovMatrix { sigma };
    if !cov.is_positive_definite() {
        return Err(ModelError::SigmaNotPd);
    }
    Ok(cov)
}

/// Sum of trek monomials for every entry. Acyclic graphs only.
pub fn trek_rule_sigma(g: &MixedGraph, params: &ParamPair) -> Result<CovMatrix, ModelError> {
    params.validate(g)?;
    let treks = all_treks(g)?;
    let n = g.n();
    let mut sigma = DMatrix::zeros(n, n);
    for ((v, w), ts) in treks {
        sigma[(v - 1, w - 1)] = ts.iter().map(|t| t.monomial().value(&params.lambda, &params.omega)).sum();
    }
    Ok(CovMatrix { sigma })
}

/// Largest eigenvalue modulus.
///
/// The unbounded Schur iteration can stall on permutation-like matrices, so
/// the QR sweep is capped and the Gelfand bound `||M^(2^k)||^(1/2^k)` is used
/// when it does not converge. That bound never underestimates.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    if let Some(schur) = Schur::try_new(m.clone(), f64::EPSILON, 10_000) {
        return schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let mut p = m.clone();
    let mut scale = 0.0_f64;
    let mut exponent = 1.0_f64;
    for _ in 0..40 {
        let norm = p.norm();
        if norm == 0.0 {
            return 0.0;
        }
        // Renormalize each step so repeated squaring cannot overflow.
        p /= norm;
        scale += norm.ln() / exponent;
        p = &p * &p;
        exponent *= 2.0;
    }
    (scale + p.norm().max(f64::MIN_POSITIVE).ln() / exponent).exp()
}

/// Random parameters following the sampling policy: edge coefficients of
/// magnitude in `[0.2, 0.9]` with random sign, bidirected entries in
/// `[-0.5, 0.5]`, and a diagonally dominant `Omega`.
pub fn sample_params(g: &MixedGraph, rng: &mut impl Rng) -> ParamPair {
    let n = g.n();
    let mut lambda = DMatrix::<f64>::zeros(n, n);
    for &(i, j) in g.directed() {
        let magnitude = rng.random_range(0.2..=0.9);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        lambda[(i - 1, j - 1)] = sign * magnitude;
    }
    if !g.is_acyclic() {
        let rho = spectral_radius(&lambda);
        if rho > SPECTRAL_RADIUS_CAP {
            lambda *= SPECTRAL_RADIUS_CAP / rho;
        }
    }
    let mut omega = DMatrix::<f64>::zeros(n, n);
    for &(i, j) in g.bidirected() {
        let w = rng.random_range(-0.5..=0.5);
        omega[(i - 1, j - 1)] = w;
        omega[(j - 1, i - 1)] = w;
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| omega[(i, j)].abs()).sum();
        omega[(i, i)] = 1.0 + off;
    }
    ParamPair { lambda, omega }
}

/// Deterministic in `(g, seed)`.
pub fn sample_model_instance(g: &MixedGraph, seed: u64) -> (ParamPair, CovMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = sample_params(g, &mut rng);
    let cov = simulate_sigma(g, &params).expect("sampling policy yields valid parameters");
    (params, cov)
}

/// `A A^T + n I` with standard normal `A`: positive definite and almost surely
/// outside any proper subvariety.
pub fn sample_off_model(n: usize, rng: &mut impl Rng) -> CovMatrix {
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let sigma = symmetrize(&(&a * a.transpose() + DMatrix::identity(n, n) * n as f64));
    CovMatrix { sigma }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn assert_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) {
        let diff = (a - b).abs().max();
        assert!(diff <= tol, "max difference {diff:e}");
    }

    #[test]
    fn zero_lambda_identity_omega() {
        let g = MixedGraph::empty(3);
        let p = ParamPair { lambda: DMatrix::zeros(3, 3), omega: DMatrix::identity(3, 3) };
        assert_eq!(simulate_sigma(&g, &p).unwrap().sigma, DMatrix::identity(3, 3));
    }

    #[test]
    fn iv_trek_rule_entry() {
        let g = fixtures::iv();
        let mut p = ParamPair { lambda: DMatrix::zeros(3, 3), omega: DMatrix::identity(3, 3) };
        p.lambda[(0, 1)] = 0.5;
        p.lambda[(1, 2)] = 0.7;
        p.omega[(1, 2)] = 0.3;
        p.omega[(2, 1)] = 0.3;
        let s = simulate_sigma(&g, &p).unwrap();
        let t = trek_rule_sigma(&g, &p).unwrap();
        assert!((t.get(1, 3) - 0.5 * 0.7).abs() < 1e-15);
        assert_close(&s.sigma, &t.sigma, 1e-12);
    }

    #[test]
    fn single_vertex() {
        let g = MixedGraph::empty(1);
        let p = ParamPair { lambda: DMatrix::zeros(1, 1), omega: DMatrix::from_element(1, 1, 2.5) };
        assert_eq!(trek_rule_sigma(&g, &p).unwrap().get(1, 1), 2.5);
    }

    #[test]
    fn support_violations() {
        let g = fixtures::iv();
        let mut p = ParamPair { lambda: DMatrix::zeros(3, 3), omega: DMatrix::identity(3, 3) };
        p.lambda[(0, 2)] = 0.1;
        assert_eq!(simulate_sigma(&g, &p), Err(ModelError::LambdaSupport(1, 3)));
        p.lambda[(0, 2)] = 0.0;
        p.omega[(0, 1)] = 0.1;
        p.omega[(1, 0)] = 0.1;
        assert_eq!(simulate_sigma(&g, &p), Err(ModelError::OmegaSupport(1, 2)));
    }

    #[test]
    fn ill_conditioned_cycle() {
        let g = MixedGraph::new(2, [(1, 2), (2, 1)], []).unwrap();
        let mut p = ParamPair { lambda: DMatrix::zeros(2, 2), omega: DMatrix::identity(2, 2) };
        p.lambda[(0, 1)] = 1.0;
        p.lambda[(1, 0)] = 1.0;
        assert!(matches!(simulate_sigma(&g, &p), Err(ModelError::IllConditioned(_))));
    }

    #[test]
    fn trek_rule_rejects_cycles() {
        let g = fixtures::cyclic_five();
        let (p, _) = sample_model_instance(&g, 1);
        assert!(matches!(trek_rule_sigma(&g, &p), Err(ModelError::Trek(_))));
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = fixtures::verma();
        assert_eq!(sample_model_instance(&g, 42), sample_model_instance(&g, 42));
        assert_ne!(sample_model_instance(&g, 42), sample_model_instance(&g, 43));
    }

    #[test]
    fn cyclic_sampling_respects_radius() {
        let g = fixtures::cyclic_five();
        for seed in 0..50 {
            let (p, s) = sample_model_instance(&g, seed);
            assert!(spectral_radius(&p.lambda) <= SPECTRAL_RADIUS_CAP + 1e-12);
            assert!(s.is_positive_definite());
        }
    }

    #[test]
    fn verma_trek_rule_matches_matrix_formula() {
        let g = fixtures::verma();
        for seed in 0..20 {
            let (p, s) = sample_model_instance(&g, seed);
            assert_close(&trek_rule_sigma(&g, &p).unwrap().sigma, &s.sigma, 1e-10);
        }
    }

    #[test]
    fn radius_of_zero_diagonal_cycle() {
        // Stalls the unbounded Schur iteration.
        let mut m = DMatrix::<f64>::zeros(4, 4);
        m[(0, 3)] = 0.6175921266543984;
        m[(1, 0)] = -0.39858341391261626;
        m[(3, 1)] = 0.4817399645653936;
        let want = (0.6175921266543984_f64 * 0.39858341391261626 * 0.4817399645653936).cbrt();
        assert!((spectral_radius(&m) - want).abs() < 1e-6);
    }

    #[test]
    fn off_model_is_pd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            assert!(sample_off_model(n, &mut rng).is_positive_definite());
        }
    }
}
