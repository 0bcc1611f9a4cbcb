use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::AlgebraError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sigma,
    Lambda,
}

/// A polynomial variable: a covariance `sigma_ij` or an edge coefficient
/// `lambda_ij`. Ordering is `(kind, i, j)`, sigma before lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Indeterminate {
    pub kind: Kind,
    pub i: u16,
    pub j: u16,
}

impl Indeterminate {
    /// `sigma_ij`, stored with `i <= j`.
    pub fn sigma(i: usize, j: usize) -> Self {
        let (a, b) = (i.min(j), i.max(j));
        Indeterminate { kind: Kind::Sigma, i: a as u16, j: b as u16 }
    }

    /// `lambda_ij`, the coefficient of edge `i -> j`.
    pub fn lambda(i: usize, j: usize) -> Self {
        Indeterminate { kind: Kind::Lambda, i: i as u16, j: j as u16 }
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i as usize, self.j as usize)
    }
}

impl fmt::Display for Indeterminate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            Kind::Sigma => 's',
            Kind::Lambda => 'l',
        };
        write!(f, "{tag}_{}_{}", self.i, self.j)
    }
}

/// Sparse exponent vector, sorted by indeterminate, no zero exponents.
///
/// `Ord` is graded lexicographic: higher total degree is greater, ties are
/// broken by the first indeterminate (in `(kind, i, j)` order) whose exponents
/// differ. Grading keeps polynomial division from wandering into ever higher
/// degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Indeterminate, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(x: Indeterminate) -> Self {
        Monomial(vec![(x, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Indeterminate, u32)>) -> Self {
        let mut map: BTreeMap<Indeterminate, u32> = BTreeMap::new();
        for (x, e) in powers {
            *map.entry(x).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn powers(&self) -> &[(Indeterminate, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, x: Indeterminate) -> u32 {
        self.0
            .binary_search_by(|(y, _)| y.cmp(&x))
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut it = other.0.iter().peekable();
        for &(x, e) in &self.0 {
            match it.peek() {
                Some(&&(y, f)) if y == x => {
                    it.next();
                    match e.cmp(&f) {
                        Ordering::Less => return None,
                        Ordering::Equal => {}
                        Ordering::Greater => out.push((x, e - f)),
                    }
                }
                Some(&&(y, _)) if y < x => return None,
                _ => out.push((x, e)),
            }
        }
        if it.next().is_some() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(x, e)| {
                    let f = other.exponent(x);
                    (f > 0).then(|| (x, e.min(f)))
                })
                .collect(),
        )
    }

    fn value_with(&self, lookup: &impl Fn(Indeterminate) -> Option<f64>) -> Result<f64, AlgebraError> {
        let mut v = 1.0;
        for &(x, e) in &self.0 {
            let base = lookup(x).ok_or(AlgebraError::MissingAssignment(x))?;
            v *= base.powi(e as i32);
        }
        Ok(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_degree = self.degree().cmp(&other.degree());
        if by_degree != Ordering::Equal {
            return by_degree;
        }
        let mut a = self.0.iter();
        let mut b = other.0.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(x, e)), Some(&(y, f))) => {
                    if x == y {
                        if e != f {
                            return e.cmp(&f);
                        }
                    } else if x < y {
                        return Ordering::Greater;
                    } else {
                        return Ordering::Less;
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, &(x, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{x}")?;
            } else {
                write!(f, "{x}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Bound on term-pair multiplications in [`Poly::mul_capped`], per allowed term.
const WORK_FACTOR: usize = 2;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms live in a `BTreeMap` under the graded lexicographic monomial order, so the
/// last entry is the leading term. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn integer(c: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(x: Indeterminate) -> Self {
        Poly::term(BigRational::one(), Monomial::var(x))
    }

    pub fn sigma(i: usize, j: usize) -> Self {
        Poly::var(Indeterminate::sigma(i, j))
    }

    pub fn lambda(i: usize, j: usize) -> Self {
        Poly::var(Indeterminate::lambda(i, j))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BigRational, Monomial)>) -> Self {
        let mut p = Poly::zero();
        for (c, m) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn indeterminates(&self) -> Vec<Indeterminate> {
        let mut vars: Vec<Indeterminate> =
            self.terms.keys().flat_map(|m| m.powers().iter().map(|&(x, _)| x)).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect() }
    }

    /// Product, refusing results with more than `max_terms` terms. Products
    /// needing more than `WORK_FACTOR * max_terms` term multiplications are
    /// refused up front, since they cost seconds even when the result is small.
    pub fn mul_capped(&self, other: &Poly, max_terms: usize) -> Result<Poly, AlgebraError> {
        let work = self.num_terms().saturating_mul(other.num_terms());
        if work > max_terms.saturating_mul(WORK_FACTOR) {
            return Err(AlgebraError::TermCap { limit: max_terms, terms: work });
        }
        let mut acc: HashMap<Monomial, BigRational> =
            HashMap::with_capacity(self.num_terms().saturating_mul(other.num_terms()).min(1 << 20));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(BigRational::zero) += ca * cb;
            }
            if acc.len() > max_terms {
                return Err(AlgebraError::TermCap { limit: max_terms, terms: acc.len() });
            }
        }
        let terms: BTreeMap<Monomial, BigRational> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.len() > max_terms {
            return Err(AlgebraError::TermCap { limit: max_terms, terms: terms.len() });
        }
        Ok(Poly { terms })
    }

    /// `self`, or a cap error if it has more than `max_terms` terms.
    pub fn capped(self, max_terms: usize) -> Result<Poly, AlgebraError> {
        if self.num_terms() > max_terms {
            return Err(AlgebraError::TermCap { limit: max_terms, terms: self.num_terms() });
        }
        Ok(self)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder (or the divisor is zero).
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if divisor.num_terms() == 1 {
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                terms.insert(m.checked_div(&lm)?, c / &lc);
            }
            return Some(Poly { terms });
        }
        let max_quotient_degree = self.degree().checked_sub(divisor.degree())?;
        let mut rem = self.clone();
        let mut quotient = Poly::zero();
        while let Some((m, c)) = rem.terms.iter().next_back() {
            let qm = m.checked_div(&lm)?;
            if qm.degree() > max_quotient_degree {
                return None;
            }
            let qc = c / &lc;
            for (dm, dc) in &divisor.terms {
                rem.add_term(dm.mul(&qm), -(&qc * dc));
            }
            quotient.add_term(qm, qc);
        }
        Some(quotient)
    }

    /// Greatest monomial dividing every term (`1` for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients. `1` for the zero polynomial.
    pub fn rational_content(&self) -> BigRational {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return BigRational::one();
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// `self` divided by its rational content.
    pub fn primitive_part(&self) -> Poly {
        let c = self.rational_content();
        self.scale(&c.recip())
    }

    /// Numeric value under `lookup`, summed with Neumaier compensation.
    pub fn eval_with(&self, lookup: impl Fn(Indeterminate) -> Option<f64>) -> Result<f64, AlgebraError> {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (m, c) in &self.terms {
            let t = coeff_f64(c) * m.value_with(&lookup)?;
            let s = sum + t;
            comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
            sum = s;
        }
        Ok(sum + comp)
    }

    /// Sum of absolute term values under `lookup`.
    pub fn magnitude_with(&self, lookup: impl Fn(Indeterminate) -> Option<f64>) -> Result<f64, AlgebraError> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            total += (coeff_f64(c) * m.value_with(&lookup)?).abs();
        }
        Ok(total)
    }

    pub fn eval(&self, assignment: &HashMap<Indeterminate, f64>) -> Result<f64, AlgebraError> {
        self.eval_with(|x| assignment.get(&x).copied())
    }

    /// Substitutes polynomials for some indeterminates.
    pub fn substitute(&self, subs: &HashMap<Indeterminate, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = Poly::constant(c.clone());
            for &(x, e) in m.powers() {
                match subs.get(&x) {
                    Some(p) => factor = &factor * &p.pow(e),
                    None => kept.push((x, e)),
                }
            }
            out = &out + &factor.mul_monomial(&Monomial::from_powers(kept));
        }
        out
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(m, c)| TermJson {
                    coeff: c.to_string(),
                    monomial: m.powers().iter().map(|&(x, e)| (x.to_string(), e)).collect(),
                })
                .collect(),
        }
    }
}

pub(crate) fn coeff_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        // numerator and denominator too large for f64 individually
        let bits = c.numer().bits().max(c.denom().bits()) as i64 - 900;
        let shift = bits.max(0) as u32;
        let n = (c.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (c.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Structured form: terms in canonical (descending) order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub monomial: Vec<(String, u32)>,
}

/// Renders `+ c * s_i_j^e ...`, leading term first.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            let sign = if c.is_negative() { '-' } else { '+' };
            if m.is_one() {
                write!(f, "{sign} {}", c.abs())?;
            } else {
                write!(f, "{sign} {} * {m}", c.abs())?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.num_terms() >= rhs.num_terms() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_capped(rhs, usize::MAX / 8).expect("uncapped product")
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly { (&self).$m(&rhs) }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Canonical representative of `p` up to nonzero rational scaling: coprime
/// integer coefficients, leading (greatest in monomial order) term positive.
pub fn canonicalize_constraint(p: &Poly) -> Result<Poly, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if let Some(x) = p.indeterminates().into_iter().find(|x| x.kind != Kind::Sigma) {
        return Err(AlgebraError::NotPureSigma(x));
    }
    let prim = p.primitive_part();
    let (_, lc) = prim.leading_term().expect("nonzero");
    Ok(if lc.is_negative() { -&prim } else { prim })
}
