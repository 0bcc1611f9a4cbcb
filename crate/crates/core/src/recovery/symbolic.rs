use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{uses_a_row, RecoveryError};
use crate::algebra::{solve_poly_system, AlgebraError, Monomial, Poly, RatFn};
use crate::graph::MixedGraph;
use crate::identify::Certificate;

pub const MAX_SYMBOLIC_VERTICES: usize = 8;

/// `lambda_{pv} = numerators[(p, v)] / denominators[v]`, one common
/// denominator per vertex. Vertices without parents have denominator `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicLambda {
    pub numerators: BTreeMap<(usize, usize), Poly>,
    pub denominators: BTreeMap<usize, Poly>,
}

impl SymbolicLambda {
    pub fn lambda(&self, p: usize, v: usize) -> Option<RatFn> {
        let num = self.numerators.get(&(p, v))?.clone();
        RatFn::new(num, self.denominator(v).clone()).ok()
    }

    pub fn denominator(&self, v: usize) -> &Poly {
        &self.denominators[&v]
    }

    pub fn numerator(&self, p: usize, v: usize) -> &Poly {
        &self.numerators[&(p, v)]
    }

    /// Polynomial row `D_s * a_{s x}` (for an `a`-row) as a function of `x`.
    pub(crate) fn scaled_a_entry(&self, g: &MixedGraph, s: usize, x: usize) -> Poly {
        let mut acc = self.denominator(s) * &Poly::sigma(s, x);
        for &l in g.parents(s) {
            acc = &acc - &(self.numerator(l, s) * &Poly::sigma(l, x));
        }
        acc
    }
}

fn divide_all(polys: &mut [Poly], d: &Poly) -> bool {
    let quotients: Option<Vec<Poly>> = polys.iter().map(|p| p.div_exact(d)).collect();
    match quotients {
        Some(q) => {
            polys.clone_from_slice(&q);
            true
        }
        None => false,
    }
}

/// Shrinks a column `nums / den` without changing its value: common monomial
/// factor, rational normalisation of `den`, and exact division by `known`.
fn reduce_column(nums: &mut Vec<Poly>, den: &mut Poly, known: &[&Poly]) {
    let mut all: Vec<Poly> = std::iter::once(den.clone()).chain(nums.iter().cloned()).collect();
    let content = all
        .iter()
        .filter(|p| !p.is_zero())
        .map(Poly::monomial_content)
        .reduce(|a, b| a.gcd(&b))
        .unwrap_or_else(Monomial::one);
    if !content.is_one() {
        divide_all(&mut all, &Poly::term(BigRational::one(), content));
    }
    for f in known.iter().filter(|f| f.num_terms() > 1) {
        while divide_all(&mut all, f) {}
    }
    let mut c = all[0].rational_content();
    if all[0].leading_term().is_some_and(|(_, lc)| lc.is_negative()) {
        c = -c;
    }
    let c = c.recip();
    *den = all[0].scale(&c);
    for (n, p) in nums.iter_mut().zip(&all[1..]) {
        *n = p.scale(&c);
    }
}

/// Symbolic `Lambda` as rational functions of the covariance entries.
pub fn recover_lambda_symbolic(
    g: &MixedGraph,
    cert: &Certificate,
    max_terms: usize,
) -> Result<SymbolicLambda, RecoveryError> {
    if g.n() > MAX_SYMBOLIC_VERTICES {
        return Err(RecoveryError::TooManyVertices { n: g.n(), limit: MAX_SYMBOLIC_VERTICES });
    }
    cert.verify(g)?;
    let rank = cert.ranks();
    let mut out = SymbolicLambda { numerators: BTreeMap::new(), denominators: BTreeMap::new() };
    for &v in &cert.order {
        let pa = g.parents(v);
        if pa.is_empty() {
            out.denominators.insert(v, Poly::one());
            continue;
        }
        let s_v = cert.set(v);
        let mut rows = Vec::with_capacity(pa.len());
        let mut rhs = Vec::with_capacity(pa.len());
        for &s in s_v {
            let entry = |x: usize| {
                if uses_a_row(&rank, s, v) {
                    out.scaled_a_entry(g, s, x)
                } else {
                    Poly::sigma(s, x)
                }
            };
            rows.push(pa.iter().map(|&p| entry(p)).collect::<Vec<_>>());
            rhs.push(entry(v));
        }
        let (mut nums, mut den) = match solve_poly_system(&rows, &rhs, max_terms) {
            Ok(x) => x,
            Err(AlgebraError::Singular) => return Err(RecoveryError::SymbolicSingular { v }),
            Err(e) => return Err(e.into()),
        };
        let known: Vec<&Poly> =
            s_v.iter().filter(|&&s| uses_a_row(&rank, s, v)).map(|s| out.denominator(*s)).collect();
        reduce_column(&mut nums, &mut den, &known);
        for (&p, num) in pa.iter().zip(nums) {
            out.numerators.insert((p, v), num);
        }
        out.denominators.insert(v, den);
    }
    Ok(out)
}
