use nalgebra::DMatrix;

use super::{check_dimension, uses_a_row, PartialLambda, RecoveryError};
use crate::graph::MixedGraph;
use crate::identify::Certificate;
use crate::model::{CovMatrix, ParamPair};

/// A pivot smaller than this times the largest entry of its original row is
/// treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-10;

/// Gaussian elimination with partial pivoting on row-scaled entries. `None`
/// when some pivot falls below the relative tolerance.
fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = m.len();
    let mut scale: Vec<f64> = m.iter().map(|row| row.iter().fold(0.0, |a: f64, x| a.max(x.abs()))).collect();
    if scale.iter().any(|&s| s == 0.0) && k > 0 {
        return None;
    }
    for c in 0..k {
        let p = (c..k).max_by(|&a, &b| (m[a][c].abs() / scale[a]).total_cmp(&(m[b][c].abs() / scale[b])))?;
        if m[p][c].abs() < PIVOT_TOLERANCE * scale[p] {
            return None;
        }
        m.swap(c, p);
        rhs.swap(c, p);
        scale.swap(c, p);
        for i in c + 1..k {
            let f = m[i][c] / m[c][c];
            if f != 0.0 {
                for j in c..k {
                    m[i][j] -= f * m[c][j];
                }
                rhs[i] -= f * rhs[c];
            }
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let tail: f64 = (i + 1..k).map(|j| m[i][j] * x[j]).sum();
        x[i] = (rhs[i] - tail) / m[i][i];
    }
    Some(x)
}

/// Recovers `Lambda` column by column in certificate order.
pub fn recover_lambda_numeric(
    g: &MixedGraph,
    cert: &Certificate,
    sigma: &CovMatrix,
) -> Result<DMatrix<f64>, RecoveryError> {
    check_dimension(g, sigma)?;
    cert.verify(g)?;
    let rank = cert.ranks();
    let mut known = PartialLambda::new();
    for &v in &cert.order {
        let pa = g.parents(v);
        if pa.is_empty() {
            continue;
        }
        let mut rows = Vec::with_capacity(pa.len());
        let mut rhs = Vec::with_capacity(pa.len());
        for &s in cert.set(v) {
            let entry = |x: usize| {
                if uses_a_row(&rank, s, v) {
                    super::a_entry(g, sigma, &known, s, x)
                } else {
                    Ok(sigma.get(s, x))
                }
            };
            rows.push(pa.iter().map(|&p| entry(p)).collect::<Result<Vec<_>, _>>()?);
            rhs.push(entry(v)?);
        }
        let x = solve(rows, rhs).ok_or(RecoveryError::Degenerate { v })?;
        for (&p, value) in pa.iter().zip(x) {
            known.insert((p, v), value);
        }
    }
    let n = g.n();
    let mut lambda = DMatrix::zeros(n, n);
    for ((p, v), value) in known {
        lambda[(p - 1, v - 1)] = value;
    }
    Ok(lambda)
}

/// `Omega = (I - Lambda)^T Sigma (I - Lambda)`, symmetrized.
pub fn recover_omega(sigma: &CovMatrix, lambda: &DMatrix<f64>) -> DMatrix<f64> {
    let n = sigma.n();
    let m = DMatrix::<f64>::identity(n, n) - lambda;
    let omega = m.transpose() * &sigma.sigma * m;
    (&omega + omega.transpose()) * 0.5
}

pub fn recover_params(g: &MixedGraph, cert: &Certificate, sigma: &CovMatrix) -> Result<ParamPair, RecoveryError> {
    let lambda = recover_lambda_numeric(g, cert, sigma)?;
    let omega = recover_omega(sigma, &lambda);
    Ok(ParamPair { lambda, omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::identify::htc_identify;
    use crate::model::{sample_model_instance, simulate_sigma};

    #[test]
    fn iv_round_trip() {
        let g = fixtures::iv();
        let mut p = ParamPair { lambda: DMatrix::zeros(3, 3), omega: DMatrix::identity(3, 3) };
        p.lambda[(0, 1)] = 0.5;
        p.lambda[(1, 2)] = 0.7;
        p.omega[(1, 2)] = 0.3;
        p.omega[(2, 1)] = 0.3;
        let s = simulate_sigma(&g, &p).unwrap();
        let cert = htc_identify(&g).unwrap();
        let l = recover_lambda_numeric(&g, &cert, &s).unwrap();
        assert!((l[(0, 1)] - 0.5).abs() < 1e-9);
        assert!((l[(1, 2)] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn iv_degenerate_when_instrument_is_irrelevant() {
        let g = fixtures::iv();
        let mut p = ParamPair { lambda: DMatrix::zeros(3, 3), omega: DMatrix::identity(3, 3) };
        p.lambda[(1, 2)] = 0.7;
        p.omega[(1, 2)] = 0.3;
        p.omega[(2, 1)] = 0.3;
        let s = simulate_sigma(&g, &p).unwrap();
        let cert = htc_identify(&g).unwrap();
        assert_eq!(recover_lambda_numeric(&g, &cert, &s), Err(RecoveryError::Degenerate { v: 3 }));
    }

    #[test]
    fn cyclic_five_lambda_two_three() {
        let g = fixtures::cyclic_five();
        let cert = htc_identify(&g).unwrap();
        let (_, s) = sample_model_instance(&g, 3);
        let l = recover_lambda_numeric(&g, &cert, &s).unwrap();
        assert!((l[(1, 2)] - s.get(1, 3) / s.get(1, 2)).abs() < 1e-12);
    }

    #[test]
    fn zero_lambda_gives_sigma_back() {
        let s = CovMatrix { sigma: DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]) };
        assert_eq!(recover_omega(&s, &DMatrix::zeros(2, 2)), s.sigma);
    }

    #[test]
    fn fixtures_round_trip() {
        for g in fixtures::all() {
            let Some(cert) = htc_identify(&g) else { continue };
            for seed in 0..10 {
                let (p, s) = sample_model_instance(&g, seed);
                let r = recover_params(&g, &cert, &s).unwrap();
                assert!((&r.lambda - &p.lambda).abs().max() < 1e-9, "{g}");
                assert!((&r.omega - &p.omega).abs().max() < 1e-9, "{g}");
            }
        }
    }

    #[test]
    fn solver_rejects_zero_rows() {
        assert!(solve(vec![vec![0.0]], vec![1.0]).is_none());
        assert!(solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
        assert_eq!(solve(vec![], vec![]), Some(vec![]));
    }
}
