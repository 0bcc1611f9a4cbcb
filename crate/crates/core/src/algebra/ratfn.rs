use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::One;

use super::{AlgebraError, Indeterminate, Poly};

/// Quotient of two polynomials. Never reduced; equality is decided by
/// cross-multiplication.
#[derive(Debug, Clone)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(RatFn { num, den })
    }

    pub fn zero() -> Self {
        RatFn::from(Poly::zero())
    }

    pub fn one() -> Self {
        RatFn::from(Poly::one())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn into_parts(self) -> (Poly, Poly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<RatFn, AlgebraError> {
        RatFn::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &RatFn) -> Result<RatFn, AlgebraError> {
        if rhs.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(RatFn { num: &self.num * &rhs.den, den: &self.den * &rhs.num })
    }

    pub fn eval_with(&self, lookup: impl Fn(Indeterminate) -> Option<f64> + Copy) -> Result<f64, AlgebraError> {
        Ok(self.num.eval_with(lookup)? / self.den.eval_with(lookup)?)
    }

    /// Cancels the common monomial factor and rational content of numerator
    /// and denominator, and any factor of `candidates` dividing both exactly.
    pub fn cancel_known(&self, candidates: &[Poly]) -> RatFn {
        let (mut num, mut den) = strip_monomial_and_content(&self.num, &self.den);
        for f in candidates.iter().filter(|f| f.num_terms() > 1) {
            while let (Some(a), Some(b)) = (num.div_exact(f), den.div_exact(f)) {
                num = a;
                den = b;
            }
        }
        RatFn { num, den }
    }
}

fn strip_monomial_and_content(num: &Poly, den: &Poly) -> (Poly, Poly) {
    if num.is_zero() {
        return (Poly::zero(), Poly::one());
    }
    let m = num.monomial_content().gcd(&den.monomial_content());
    let (mut num, mut den) = if m.is_one() {
        (num.clone(), den.clone())
    } else {
        (num.div_exact(&Poly::term(BigRational::one(), m.clone())).unwrap(), den.div_exact(&Poly::term(BigRational::one(), m)).unwrap())
    };
    let c = den.rational_content();
    num = num.scale(&c.recip());
    den = den.scale(&c.recip());
    (num, den)
}

impl From<Poly> for RatFn {
    fn from(p: Poly) -> Self {
        RatFn { num: p, den: Poly::one() }
    }
}

/// `a/b == c/d` iff `a*d == c*b`.
impl PartialEq for RatFn {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if self.den == rhs.den {
            return RatFn { num: &self.num + &rhs.num, den: self.den.clone() };
        }
        RatFn { num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den), den: &self.den * &rhs.den }
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        RatFn { num: &self.num * &rhs.num, den: &self.den * &rhs.den }
    }
}

/// Panics on division by zero; see [`RatFn::checked_div`].
impl Div for &RatFn {
    type Output = RatFn;
    fn div(self, rhs: &RatFn) -> RatFn {
        self.checked_div(rhs).expect("division by the zero rational function")
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: usize, j: usize) -> RatFn {
        RatFn::from(Poly::sigma(i, j))
    }

    #[test]
    fn equality_by_cross_multiplication() {
        let a = &s(1, 3) / &s(1, 2);
        let b = &(&s(1, 1) * &s(1, 3)) / &(&s(1, 1) * &s(1, 2));
        assert_eq!(a, b);
        assert_ne!(a, &s(1, 2) / &s(1, 3));
    }

    #[test]
    fn adding_zero() {
        let a = &s(1, 2) / &s(1, 1);
        assert_eq!(&a + &RatFn::zero(), a);
        assert_eq!(&a - &a, RatFn::zero());
        assert_eq!(&a * &a.recip().unwrap(), RatFn::one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(RatFn::new(Poly::one(), Poly::zero()).unwrap_err(), AlgebraError::DivisionByZero);
        assert_eq!(s(1, 1).checked_div(&RatFn::zero()).unwrap_err(), AlgebraError::DivisionByZero);
    }

    #[test]
    fn cancel_known_factors() {
        let f = &Poly::sigma(1, 1) * &Poly::sigma(2, 2) - &Poly::sigma(1, 2) * &Poly::sigma(1, 2);
        let num = &(&f * &Poly::sigma(1, 3)) * &Poly::sigma(4, 4);
        let den = (&f * &Poly::sigma(4, 4)).scale(&BigRational::from_integer(3.into()));
        let r = RatFn::new(num, den).unwrap().cancel_known(&[f]);
        assert_eq!(r.num(), &Poly::sigma(1, 3).scale(&BigRational::new(1.into(), 3.into())));
        assert_eq!(r.den(), &Poly::one());
    }
}
