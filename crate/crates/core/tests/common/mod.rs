//! Independent oracles used by the integration tests. None of them share code
//! with the library algorithms they check.

#![allow(dead_code)]

use std::collections::BTreeSet;

use htcsem::MixedGraph;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Reachability by directed paths of length >= 1, via Warshall's closure.
pub fn transitive_closure(g: &MixedGraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut r = vec![vec![false; n + 1]; n + 1];
    for &(i, j) in g.directed() {
        r[i][j] = true;
    }
    for k in 1..=n {
        for i in 1..=n {
            if r[i][k] {
                for j in 1..=n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Vertices reached from `v` by a half-trek with at least one edge: a proper
/// directed path out of `v`, or a bidirected step followed by any directed
/// path.
pub fn naive_htr(g: &MixedGraph, v: usize) -> BTreeSet<usize> {
    let r = transitive_closure(g);
    let mut out: BTreeSet<usize> = (1..=g.n()).filter(|&w| r[v][w]).collect();
    for s in 1..=g.n() {
        if s != v && g.has_bidirected(v, s) {
            out.insert(s);
            out.extend((1..=g.n()).filter(|&w| r[s][w]));
        }
    }
    out
}

fn simple_paths(g: &MixedGraph, from: usize, to: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if from == to {
        out.push(path.clone());
        return;
    }
    for j in 1..=g.n() {
        if g.has_directed(from, j) && !path.contains(&j) {
            path.push(j);
            simple_paths(g, j, to, path, out);
            path.pop();
        }
    }
}

/// Right sides of every half-trek from `y` to `p` built from simple paths.
pub fn half_trek_right_sides(g: &MixedGraph, y: usize, p: usize) -> Vec<BTreeSet<usize>> {
    let mut paths = Vec::new();
    simple_paths(g, y, p, &mut vec![y], &mut paths);
    for s in 1..=g.n() {
        if s != y && g.has_bidirected(y, s) {
            simple_paths(g, s, p, &mut vec![s], &mut paths);
        }
    }
    paths.into_iter().map(|p| p.into_iter().collect()).collect()
}

/// Whether some matching of `sources` onto `targets` admits half-treks with
/// pairwise disjoint right sides. Left sides are the distinct sources, so
/// they never meet.
pub fn has_half_trek_system(g: &MixedGraph, sources: &[usize], targets: &[usize]) -> bool {
    fn place(
        g: &MixedGraph,
        sources: &[usize],
        targets: &[usize],
        used_targets: &mut Vec<bool>,
        covered: &mut BTreeSet<usize>,
    ) -> bool {
        let Some((&y, rest)) = sources.split_first() else { return true };
        for (k, &p) in targets.iter().enumerate() {
            if used_targets[k] {
                continue;
            }
            for side in half_trek_right_sides(g, y, p) {
                if side.is_disjoint(covered) {
                    used_targets[k] = true;
                    covered.extend(&side);
                    if place(g, rest, targets, used_targets, covered) {
                        return true;
                    }
                    for x in &side {
                        covered.remove(x);
                    }
                    used_targets[k] = false;
                }
            }
        }
        false
    }
    sources.len() == targets.len()
        && place(g, sources, targets, &mut vec![false; targets.len()], &mut BTreeSet::new())
}

fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets_of_size(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Sets `Y` admissible for `v` ignoring the ordering condition.
pub fn admissible_sets(g: &MixedGraph, v: usize) -> Vec<Vec<usize>> {
    let pool: Vec<usize> = (1..=g.n()).filter(|&w| w != v && !g.has_bidirected(v, w)).collect();
    let pa: Vec<usize> = g.parents(v).to_vec();
    subsets_of_size(&pool, pa.len()).into_iter().filter(|y| has_half_trek_system(g, y, &pa)).collect()
}

/// HTC-identifiability by searching every family of admissible sets for one
/// whose "y in Y_v and in htr(v)" relation is acyclic.
pub fn brute_force_htc(g: &MixedGraph) -> bool {
    let n = g.n();
    let htr: Vec<BTreeSet<usize>> = (0..=n).map(|v| if v == 0 { BTreeSet::new() } else { naive_htr(g, v) }).collect();
    let options: Vec<Vec<Vec<usize>>> = (1..=n).map(|v| admissible_sets(g, v)).collect();
    if options.iter().any(Vec::is_empty) {
        return false;
    }
    let mut choice = vec![0usize; n];
    loop {
        let mut edges = vec![vec![false; n + 1]; n + 1];
        for v in 1..=n {
            for &y in &options[v - 1][choice[v - 1]] {
                if htr[v].contains(&y) {
                    edges[y][v] = true;
                }
            }
        }
        if is_acyclic_relation(&edges, n) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn is_acyclic_relation(edges: &[Vec<bool>], n: usize) -> bool {
    let mut removed = vec![false; n + 1];
    for _ in 0..n {
        let Some(v) = (1..=n).find(|&v| !removed[v] && (1..=n).all(|u| removed[u] || !edges[u][v])) else {
            return false;
        };
        removed[v] = true;
    }
    true
}

/// `Sigma_{AA.B} = Sigma_AA - Sigma_AB Sigma_BB^{-1} Sigma_BA`, 1-based index lists.
pub fn conditional_covariance(sigma: &DMatrix<f64>, a: &[usize], b: &[usize]) -> DMatrix<f64> {
    let pick = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| sigma[(rows[i] - 1, cols[j] - 1)]);
    let saa = pick(a, a);
    if b.is_empty() {
        return saa;
    }
    let sab = pick(a, b);
    let sbb_inv = pick(b, b).try_inverse().expect("conditioning block is invertible");
    &saa - &sab * sbb_inv * sab.transpose()
}

/// Graph on `1..=max_n` vertices with independent edge bits.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = MixedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let directed = proptest::collection::vec(proptest::bool::weighted(0.3), n * (n - 1));
        let bidirected = proptest::collection::vec(proptest::bool::weighted(0.3), n * (n - 1) / 2);
        (Just(n), directed, bidirected).prop_map(|(n, d, b)| {
            let ordered = (1..=n).flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)));
            let unordered = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
            let directed: Vec<_> = ordered.zip(d).filter(|(_, on)| *on).map(|(e, _)| e).collect();
            let bidirected: Vec<_> = unordered.zip(b).filter(|(_, on)| *on).map(|(e, _)| e).collect();
            MixedGraph::new(n, directed, bidirected).unwrap()
        })
    })
}
