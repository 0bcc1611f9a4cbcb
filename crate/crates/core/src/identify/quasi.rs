use std::collections::BTreeSet;

use crate::graph::MixedGraph;

/// Fixpoint of the quasi-linear recursion. A vertex joins once it has at
/// least `|pa(v)|` candidates: vertices other than itself and its siblings
/// that are already in the set or are not half-trek reachable from it.
pub fn quasi_linear_vertices(g: &MixedGraph) -> BTreeSet<usize> {
    let htr: Vec<BTreeSet<usize>> = g.vertices().map(|v| g.half_trek_reachable(v)).collect();
    let mut q = BTreeSet::new();
    loop {
        let mut progress = false;
        for v in g.vertices() {
            if q.contains(&v) {
                continue;
            }
            let candidates = g
                .vertices()
                .filter(|&j| j != v && !g.siblings(v).contains(&j))
                .filter(|j| q.contains(j) || !htr[v - 1].contains(j))
                .count();
            if candidates >= g.parents(v).len() {
                q.insert(v);
                progress = true;
            }
        }
        if !progress {
            return q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn chain_is_quasi_linear() {
        assert_eq!(quasi_linear_vertices(&fixtures::quasi_linear_chain()), BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn three_bows_stall() {
        assert_eq!(quasi_linear_vertices(&fixtures::three_bows()), BTreeSet::from([1]));
    }

    #[test]
    fn empty_graph_is_complete() {
        assert_eq!(quasi_linear_vertices(&MixedGraph::empty(3)).len(), 3);
    }
}
