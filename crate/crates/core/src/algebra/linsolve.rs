use super::{AlgebraError, Poly, RatFn};

/// Determinant of a square polynomial matrix by Bareiss fraction-free
/// elimination. Every intermediate division is exact. The pivot in each column
/// is the nonzero entry at or below the diagonal with the fewest terms, which
/// keeps large entries out of the repeated products.
pub fn bareiss_determinant(mut m: Vec<Vec<Poly>>, max_terms: usize) -> Result<Poly, AlgebraError> {
    let n = m.len();
    if n == 0 {
        return Ok(Poly::one());
    }
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n {
        let Some(p) = (k..n).filter(|&i| !m[i][k].is_zero()).min_by_key(|&i| m[i][k].num_terms()) else {
            return Ok(Poly::zero());
        };
        if p != k {
            m.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = m[i][j].mul_capped(&m[k][k], max_terms)?;
                let rhs = m[i][k].mul_capped(&m[k][j], max_terms)?;
                let diff = (&lhs - &rhs).capped(max_terms)?;
                m[i][j] = diff.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m.pop().and_then(|mut row| row.pop()).expect("nonempty");
    Ok(if negate { -&det } else { det })
}

/// Solves `m x = rhs` over the polynomial ring's fraction field by Cramer's
/// rule with Bareiss determinants. Returns numerators and the common
/// denominator `det(m)`.
pub fn solve_poly_system(
    m: &[Vec<Poly>],
    rhs: &[Poly],
    max_terms: usize,
) -> Result<(Vec<Poly>, Poly), AlgebraError> {
    let k = m.len();
    assert!(m.iter().all(|row| row.len() == k) && rhs.len() == k, "square system expected");
    let det = bareiss_determinant(m.to_vec(), max_terms)?;
    if det.is_zero() {
        return Err(AlgebraError::Singular);
    }
    let mut numerators = Vec::with_capacity(k);
    for col in 0..k {
        let replaced: Vec<Vec<Poly>> = m
            .iter()
            .zip(rhs)
            .map(|(row, b)| {
                let mut row = row.clone();
                row[col] = b.clone();
                row
            })
            .collect();
        numerators.push(bareiss_determinant(replaced, max_terms)?);
    }
    Ok((numerators, det))
}

/// Exact solution of `a x = b` with rational-function entries.
///
/// Each row is first scaled by the product of its distinct denominators so the
/// elimination runs on polynomials only.
pub fn gauss_solve_ratfn(a: &[Vec<RatFn>], b: &[RatFn], max_terms: usize) -> Result<Vec<RatFn>, AlgebraError> {
    let mut rows = Vec::with_capacity(a.len());
    let mut rhs = Vec::with_capacity(b.len());
    for (row, bi) in a.iter().zip(b) {
        let mut dens: Vec<&Poly> = Vec::new();
        for d in row.iter().chain(std::iter::once(bi)).map(RatFn::den) {
            if !dens.contains(&d) {
                dens.push(d);
            }
        }
        let scale = dens.iter().fold(Poly::one(), |acc, d| &acc * *d);
        let clear = |r: &RatFn| -> Poly {
            let cofactor = scale.div_exact(r.den()).expect("denominator divides the row scale");
            r.num() * &cofactor
        };
        rows.push(row.iter().map(clear).collect::<Vec<_>>());
        rhs.push(clear(bi));
    }
    let (nums, det) = solve_poly_system(&rows, &rhs, max_terms)?;
    nums.into_iter().map(|n| RatFn::new(n, det.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_MAX_TERMS;

    fn s(i: usize, j: usize) -> Poly {
        Poly::sigma(i, j)
    }

    #[test]
    fn determinant_two_by_two() {
        let m = vec![vec![s(1, 1), s(1, 2)], vec![s(1, 2), s(2, 2)]];
        let det = bareiss_determinant(m, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(det, &(&s(1, 1) * &s(2, 2)) - &(&s(1, 2) * &s(1, 2)));
    }

    #[test]
    fn determinant_with_pivot_swap() {
        let m = vec![
            vec![Poly::zero(), s(1, 2), s(1, 3)],
            vec![s(1, 1), Poly::zero(), s(2, 3)],
            vec![Poly::zero(), s(2, 2), Poly::zero()],
        ];
        // first-row cofactor expansion: 0 - s12 * (s11*0 - s23*0) + s13 * (s11*s22 - 0)
        let det = bareiss_determinant(m, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(det, &(&s(1, 1) * &s(1, 3)) * &s(2, 2));
    }

    #[test]
    fn singular_system_reported() {
        let two = num_rational::BigRational::from_integer(2.into());
        let m = vec![vec![s(1, 1), s(1, 2)], vec![s(1, 1).scale(&two), s(1, 2).scale(&two)]];
        assert_eq!(solve_poly_system(&m, &[s(1, 3), s(2, 3)], DEFAULT_MAX_TERMS).unwrap_err(), AlgebraError::Singular);
    }

    #[test]
    fn iv_one_by_one() {
        // a_12 x = a_13 with vertex 1 parentless.
        let x = gauss_solve_ratfn(&[vec![RatFn::from(s(1, 2))]], &[RatFn::from(s(1, 3))], DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(x[0], RatFn::new(s(1, 3), s(1, 2)).unwrap());
    }

    #[test]
    fn identity_system_returns_rhs() {
        let id = vec![
            vec![RatFn::one(), RatFn::zero()],
            vec![RatFn::zero(), RatFn::one()],
        ];
        let b = vec![RatFn::new(s(1, 2), s(1, 1)).unwrap(), RatFn::from(s(3, 4))];
        let x = gauss_solve_ratfn(&id, &b, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(x, b);
    }
}
