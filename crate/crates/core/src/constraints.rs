//! Generators of the model ideal and their evaluation at covariance matrices.
//!
//! For each pair `i < j` with no bidirected edge and neither vertex in the
//! other's set, `b_ij` is a rational function in the covariances once the
//! recovered `Lambda` is substituted. It equals `omega_ij = 0` on the model,
//! and its numerator is the generator.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{canonicalize_constraint, AlgebraError, Indeterminate, Poly, PolyJson, RatFn};
use crate::graph::MixedGraph;
use crate::identify::Certificate;
use crate::model::CovMatrix;
use crate::recovery::{recover_lambda_symbolic, RecoveryError, SymbolicLambda};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstraintError {
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("b_{0}_{1} vanishes identically; the certificate does not determine this pair")]
    ZeroGenerator(usize, usize),
    #[error("covariance matrix is {got}x{got}, constraints are over {want} variables")]
    Dimension { got: usize, want: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    pub n: usize,
    pub generators: Vec<Poly>,
    /// Pair `(i, j)` each generator came from.
    pub pairs: Vec<(usize, usize)>,
    /// Denominator cleared from each generator. Nonzero on generic points.
    pub denominators: Vec<Poly>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintJson {
    pub pair: (usize, usize),
    pub text: String,
    pub polynomial: PolyJson,
    pub denominator: PolyJson,
}

impl ConstraintSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn to_json(&self) -> Vec<ConstraintJson> {
        self.generators
            .iter()
            .zip(&self.pairs)
            .zip(&self.denominators)
            .map(|((p, &pair), d)| ConstraintJson {
                pair,
                text: p.to_string(),
                polynomial: p.to_json(),
                denominator: d.to_json(),
            })
            .collect()
    }
}

/// Expected number of generators for an identifiable graph.
pub fn expected_generator_count(g: &MixedGraph) -> isize {
    let n = g.n() as isize;
    n * (n - 1) / 2 - g.directed().len() as isize - g.bidirected().len() as isize
}

/// `D_i D_j b_ij` as a polynomial, using the `a`-row of `i`.
pub(crate) fn scaled_b(
    g: &MixedGraph,
    sol: &SymbolicLambda,
    i: usize,
    j: usize,
    max_terms: usize,
) -> Result<Poly, AlgebraError> {
    let mut acc = sol.denominator(j).mul_capped(&sol.scaled_a_entry(g, i, j), max_terms)?;
    for &k in g.parents(j) {
        acc = (&acc - &sol.numerator(k, j).mul_capped(&sol.scaled_a_entry(g, i, k), max_terms)?).capped(max_terms)?;
    }
    Ok(acc)
}

/// `b_ij` after substitution, as a rational function.
pub fn symbolic_b(
    g: &MixedGraph,
    sol: &SymbolicLambda,
    i: usize,
    j: usize,
    max_terms: usize,
) -> Result<RatFn, AlgebraError> {
    let den = sol.denominator(i).mul_capped(sol.denominator(j), max_terms)?;
    RatFn::new(scaled_b(g, sol, i, j, max_terms)?, den)
}

/// Removes from `num` the factors it visibly shares with `den`: the common
/// monomial part and any factor of `den_factors` dividing both.
fn cancel_with_denominator(num: Poly, den_factors: &[&Poly], max_terms: usize) -> Result<(Poly, Poly), AlgebraError> {
    let mut den = Poly::one();
    for d in den_factors {
        den = den.mul_capped(d, max_terms)?;
    }
    let free: Vec<Poly> = den_factors
        .iter()
        .map(|d| d.div_exact(&Poly::term(BigRational::one(), d.monomial_content())).expect("monomial divides"))
        .collect();
    Ok(RatFn::new(num, den).expect("denominators are nonzero").cancel_known(&free).into_parts())
}

/// Builds one canonical generator per qualifying pair.
pub fn model_ideal_generators(
    g: &MixedGraph,
    cert: &Certificate,
    max_terms: usize,
) -> Result<ConstraintSet, ConstraintError> {
    let sol = recover_lambda_symbolic(g, cert, max_terms)?;
    let mut set = ConstraintSet { n: g.n(), generators: Vec::new(), pairs: Vec::new(), denominators: Vec::new() };
    for i in g.vertices() {
        for j in i + 1..=g.n() {
            if g.has_bidirected(i, j) || cert.set(j).contains(&i) || cert.set(i).contains(&j) {
                continue;
            }
            let raw = scaled_b(g, &sol, i, j, max_terms)?;
            if raw.is_zero() {
                return Err(ConstraintError::ZeroGenerator(i, j));
            }
            let (num, den) = cancel_with_denominator(raw, &[sol.denominator(i), sol.denominator(j)], max_terms)?;
            set.generators.push(canonicalize_constraint(&num)?);
            set.pairs.push((i, j));
            set.denominators.push(den);
        }
    }
    Ok(set)
}

fn sigma_lookup(sigma: &CovMatrix) -> impl Fn(Indeterminate) -> Option<f64> + Copy + '_ {
    move |x: Indeterminate| {
        let (i, j) = x.indices();
        (i <= sigma.n() && j <= sigma.n()).then(|| sigma.get(i, j))
    }
}

/// `|f(Sigma)| / (1 + sum of |term values|)` for each generator.
pub fn evaluate_constraints(cs: &ConstraintSet, sigma: &CovMatrix) -> Result<Vec<f64>, ConstraintError> {
    if sigma.n() != cs.n {
        return Err(ConstraintError::Dimension { got: sigma.n(), want: cs.n });
    }
    let lookup = sigma_lookup(sigma);
    cs.generators
        .iter()
        .map(|f| Ok(f.eval_with(lookup)?.abs() / (1.0 + f.magnitude_with(lookup)?)))
        .collect()
}

/// Scaled residual of a single polynomial, for ad hoc checks.
pub fn residual(f: &Poly, sigma: &CovMatrix) -> Result<f64, AlgebraError> {
    let lookup = sigma_lookup(sigma);
    Ok(f.eval_with(lookup)?.abs() / (1.0 + f.magnitude_with(lookup)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_MAX_TERMS;
    use crate::fixtures;
    use crate::identify::htc_identify;
    use crate::model::{sample_model_instance, sample_off_model};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(i: usize, j: usize) -> Poly {
        Poly::sigma(i, j)
    }

    fn prod(factors: &[(usize, usize)]) -> Poly {
        factors.iter().fold(Poly::one(), |acc, &(i, j)| &acc * &s(i, j))
    }

    fn generators(g: &MixedGraph) -> ConstraintSet {
        model_ideal_generators(g, &htc_identify(g).unwrap(), DEFAULT_MAX_TERMS).unwrap()
    }

    #[test]
    fn gadget_generator() {
        let cs = generators(&fixtures::gadget());
        assert_eq!(cs.len(), 1);
        let want = &(&(&prod(&[(1, 1), (2, 2), (3, 4)]) - &prod(&[(1, 3), (1, 4), (2, 2)]))
            + &prod(&[(1, 2), (1, 3), (2, 4)]))
            - &prod(&[(1, 1), (2, 3), (2, 4)]);
        assert_eq!(cs.generators[0], canonicalize_constraint(&want).unwrap());
    }

    #[test]
    fn verma_generator() {
        let cs = generators(&fixtures::verma());
        assert_eq!(cs.len(), 1);
        assert_eq!(cs.pairs, vec![(1, 4)]);
        let terms: [(i64, &[(usize, usize)]); 8] = [
            (1, &[(1, 1), (1, 3), (2, 2), (3, 4)]),
            (-1, &[(1, 2), (1, 2), (1, 3), (3, 4)]),
            (-1, &[(1, 1), (1, 4), (2, 2), (3, 3)]),
            (1, &[(1, 2), (1, 2), (1, 4), (3, 3)]),
            (-1, &[(1, 1), (1, 3), (2, 3), (2, 4)]),
            (1, &[(1, 1), (1, 4), (2, 3), (2, 3)]),
            (1, &[(1, 2), (1, 3), (1, 3), (2, 4)]),
            (-1, &[(1, 2), (1, 3), (1, 4), (2, 3)]),
        ];
        let f = terms.iter().fold(Poly::zero(), |acc, &(c, fs)| &acc + &(&Poly::integer(c) * &prod(fs)));
        assert_eq!(cs.generators[0], canonicalize_constraint(&f).unwrap());
    }

    #[test]
    fn iv_has_no_constraints() {
        assert!(generators(&fixtures::iv()).is_empty());
    }

    #[test]
    fn counts_match_formula() {
        for g in fixtures::all() {
            let Some(cert) = htc_identify(&g) else { continue };
            let cs = model_ideal_generators(&g, &cert, DEFAULT_MAX_TERMS).unwrap();
            assert_eq!(cs.len() as isize, expected_generator_count(&g), "{g}");
        }
    }

    #[test]
    fn vanish_on_model_not_off_it() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in fixtures::all() {
            let Some(cert) = htc_identify(&g) else { continue };
            let cs = model_ideal_generators(&g, &cert, DEFAULT_MAX_TERMS).unwrap();
            for seed in 0..10 {
                let (_, cov) = sample_model_instance(&g, seed);
                assert!(evaluate_constraints(&cs, &cov).unwrap().iter().all(|&r| r <= 1e-8), "{g}");
                let off = sample_off_model(g.n(), &mut rng);
                assert!(evaluate_constraints(&cs, &off).unwrap().iter().all(|&r| r > 1e-6), "{g}");
            }
        }
    }

    #[test]
    fn used_pairs_vanish_identically() {
        for g in [fixtures::verma(), fixtures::gadget(), fixtures::saturated_triangle(), fixtures::iv()] {
            let cert = htc_identify(&g).unwrap();
            let sol = recover_lambda_symbolic(&g, &cert, DEFAULT_MAX_TERMS).unwrap();
            for v in g.vertices() {
                for &s in cert.set(v) {
                    assert!(scaled_b(&g, &sol, s, v, DEFAULT_MAX_TERMS).unwrap().is_zero(), "{g}: b_{s}_{v}");
                }
            }
        }
    }

    #[test]
    fn empty_set_evaluates_to_nothing() {
        let cs = ConstraintSet { n: 2, generators: vec![], pairs: vec![], denominators: vec![] };
        let sigma = CovMatrix { sigma: nalgebra::DMatrix::identity(2, 2) };
        assert!(evaluate_constraints(&cs, &sigma).unwrap().is_empty());
        let wrong = CovMatrix { sigma: nalgebra::DMatrix::identity(3, 3) };
        assert!(matches!(evaluate_constraints(&cs, &wrong), Err(ConstraintError::Dimension { .. })));
    }
}
