//! The recursive linear criterion, decided algebraically.
//!
//! A set `S` works for `v` when the matrix `[Omega (I - Lambda)^{-1}]_{S, pa(v)}`
//! is generically invertible. Its rank is computed exactly modulo a large
//! prime at a pseudo-random parameter point, so this never touches the flow
//! network and serves as an independent check of [`super::htc_identify`].

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{allowed_set, Certificate};
use crate::graph::MixedGraph;

const P: u64 = (1 << 61) - 1;
const POINT_SEED: u64 = 0x5eed_1de7_0f1a_b1e5;

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn add(a: u64, b: u64) -> u64 {
    (a + b) % P
}

fn sub(a: u64, b: u64) -> u64 {
    (a + P - b) % P
}

fn inv(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, P - 2, 1);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

type Matrix = Vec<Vec<u64>>;

/// Row-reduces in place and returns the rank.
fn rank(mut m: Matrix) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let pivot_inv = inv(m[r][c]);
        for i in r + 1..rows {
            let f = mul(m[i][c], pivot_inv);
            if f != 0 {
                for j in c..cols {
                    m[i][j] = sub(m[i][j], mul(f, m[r][j]));
                }
            }
        }
        r += 1;
    }
    r
}

fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| a[i][c] != 0)?;
        a.swap(c, p);
        let pivot_inv = inv(a[c][c]);
        for x in a[c].iter_mut() {
            *x = mul(*x, pivot_inv);
        }
        for i in 0..n {
            if i != c && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..2 * n {
                    a[i][j] = sub(a[i][j], mul(f, a[c][j]));
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// `Omega (I - Lambda)^{-1}` at a random point, 0-indexed.
fn half_trek_matrix(g: &MixedGraph, rng: &mut ChaCha8Rng) -> Matrix {
    let n = g.n();
    loop {
        let mut draw = || rng.random_range(1..P);
        let mut i_minus_l: Matrix = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        for &(a, b) in g.directed() {
            i_minus_l[a - 1][b - 1] = sub(0, draw());
        }
        let mut omega: Matrix = vec![vec![0; n]; n];
        for i in 0..n {
            omega[i][i] = draw();
        }
        for &(a, b) in g.bidirected() {
            let w = draw();
            omega[a - 1][b - 1] = w;
            omega[b - 1][a - 1] = w;
        }
        let Some(m_inv) = inverse(&i_minus_l) else { continue };
        return (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(0, |acc, k| add(acc, mul(omega[i][k], m_inv[k][j])))).collect())
            .collect();
    }
}

/// Greedy recursion in which `S_v` is the lexicographically first subset of
/// the allowed vertices whose half-trek matrix onto `pa(v)` has full rank.
pub fn linear_identify(g: &MixedGraph) -> Option<Certificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(POINT_SEED);
    let a = half_trek_matrix(g, &mut rng);
    let mut solved = BTreeSet::new();
    let mut cert = Certificate { order: Vec::with_capacity(g.n()), sets: Default::default() };
    loop {
        let mut progress = false;
        for v in g.vertices() {
            if solved.contains(&v) {
                continue;
            }
            let pa = g.parents(v);
            let allowed = allowed_set(g, v, &solved);
            let found = allowed.iter().copied().combinations(pa.len()).find(|s| {
                let sub: Matrix = s.iter().map(|&y| pa.iter().map(|&p| a[y - 1][p - 1]).collect()).collect();
                rank(sub) == pa.len()
            });
            if let Some(s) = found {
                solved.insert(v);
                cert.order.push(v);
                cert.sets.insert(v, s);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    (solved.len() == g.n()).then_some(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::identify::htc_identify;

    #[test]
    fn field_inverse() {
        for a in [1, 2, 12345, P - 1] {
            assert_eq!(mul(a, inv(a)), 1);
        }
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank(vec![vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(vec![vec![0, 1], vec![1, 0]]), 2);
        assert_eq!(rank(vec![]), 0);
    }

    #[test]
    fn saturated_triangle_is_linear() {
        let g = fixtures::saturated_triangle();
        let c = linear_identify(&g).unwrap();
        c.verify(&g).unwrap();
    }

    #[test]
    fn chain_is_not_linear() {
        assert!(linear_identify(&fixtures::quasi_linear_chain()).is_none());
    }

    #[test]
    fn agrees_with_htc_on_fixtures() {
        for g in fixtures::all() {
            let h = htc_identify(&g);
            let l = linear_identify(&g);
            assert_eq!(h.is_some(), l.is_some(), "{g}");
            if let Some(c) = l {
                c.verify(&g).unwrap();
            }
        }
    }
}
