use std::collections::BTreeSet;

use super::{allowed_set, Certificate};
use crate::flow::FlowNetwork;
use crate::graph::MixedGraph;
use crate::trek::{Bridge, Trek};

/// Half-treks from the sources of `S_v` onto `pa(v)`, one per parent. Left
/// sides are the single vertices of `S_v`; right sides are pairwise disjoint.
pub type HalfTrekSystem = Vec<Trek>;

const SOURCE: usize = 0;
const SINK: usize = 1;

/// Node-split network: `L(y)` is the left end of a half-trek, `R(w)` a vertex
/// on some right side, split into an in-node and an out-node of capacity 1.
struct HalfTrekNetwork {
    net: FlowNetwork,
    n: usize,
}

impl HalfTrekNetwork {
    fn left(&self, y: usize) -> usize {
        2 + (y - 1)
    }

    fn right_in(&self, w: usize) -> usize {
        2 + self.n + (w - 1)
    }

    fn right_out(&self, w: usize) -> usize {
        2 + 2 * self.n + (w - 1)
    }

    /// Everything except the source arcs, which callers add one at a time.
    fn new(g: &MixedGraph, targets: &[usize]) -> Self {
        let n = g.n();
        let mut h = HalfTrekNetwork { net: FlowNetwork::new(2 + 3 * n), n };
        for y in g.vertices() {
            let (l, r) = (h.left(y), h.right_in(y));
            h.net.add_edge(l, r, 1);
            for &w in g.siblings(y) {
                let rw = h.right_in(w);
                h.net.add_edge(l, rw, 1);
            }
        }
        for w in g.vertices() {
            let (ri, ro) = (h.right_in(w), h.right_out(w));
            h.net.add_edge(ri, ro, 1);
            for &u in g.children(w) {
                let ru = h.right_in(u);
                h.net.add_edge(ro, ru, 1);
            }
        }
        for &p in targets {
            let rp = h.right_out(p);
            h.net.add_edge(rp, SINK, 1);
        }
        h
    }

    fn add_source(&mut self, y: usize) -> (usize, usize) {
        let l = self.left(y);
        self.net.add_edge(SOURCE, l, 1)
    }

    fn extract(&mut self) -> HalfTrekSystem {
        let mut system: HalfTrekSystem = self
            .net
            .decompose(SOURCE, SINK)
            .into_iter()
            .map(|path| {
                // source, L(y), then (R_in(w), R_out(w)) pairs, then sink
                let y = path[1] - 1;
                let right: Vec<usize> =
                    path[2..path.len() - 1].iter().step_by(2).map(|&node| node - 1 - self.n).collect();
                let bridge = if right[0] == y { Bridge::Source(y) } else { Bridge::Bidirected(y, right[0]) };
                Trek { left: vec![y], right, bridge }
            })
            .collect();
        system.sort_by_key(|t| t.left[0]);
        system
    }
}

/// A half-trek system with no sided intersection from exactly the vertices of
/// `sources` onto `targets`, if one exists.
pub fn half_trek_system(g: &MixedGraph, sources: &[usize], targets: &[usize]) -> Option<HalfTrekSystem> {
    if sources.len() != targets.len() {
        return None;
    }
    let mut h = HalfTrekNetwork::new(g, targets);
    for &y in sources {
        h.add_source(y);
    }
    (h.net.max_flow(SOURCE, SINK) as usize == targets.len()).then(|| h.extract())
}

/// Picks `S_v` from `allowed` so that it satisfies the half-trek criterion
/// with respect to `v`.
///
/// `pa(v)` itself is preferred whenever it is allowed and admissible. Otherwise
/// candidates are tried in ascending order and each is kept if it raises the
/// flow by one, which yields the lexicographically smallest admissible set.
pub fn htc_admissible_set(
    g: &MixedGraph,
    v: usize,
    allowed: &BTreeSet<usize>,
) -> Option<(Vec<usize>, HalfTrekSystem)> {
    let pa = g.parents(v);
    if pa.iter().all(|p| allowed.contains(p)) {
        if let Some(system) = half_trek_system(g, pa, pa) {
            return Some((pa.to_vec(), system));
        }
    }
    let mut h = HalfTrekNetwork::new(g, pa);
    let mut chosen = Vec::with_capacity(pa.len());
    for &y in allowed {
        if chosen.len() == pa.len() {
            break;
        }
        let arc = h.add_source(y);
        if h.net.augment_once(SOURCE, SINK) {
            chosen.push(y);
        } else {
            // a failed search pushed no flow, so the arc is still unused
            h.net.disable(arc);
        }
    }
    (chosen.len() == pa.len()).then(|| {
        let system = h.extract();
        (chosen, system)
    })
}

/// Greedy fixpoint over the vertices: a vertex is solved once the solved
/// vertices together with the non-reachable ones contain an admissible set.
pub fn htc_identify(g: &MixedGraph) -> Option<Certificate> {
    let mut solved = BTreeSet::new();
    let mut cert = Certificate { order: Vec::with_capacity(g.n()), sets: Default::default() };
    loop {
        let mut progress = false;
        for v in g.vertices() {
            if solved.contains(&v) {
                continue;
            }
            let allowed = allowed_set(g, v, &solved);
            if let Some((s, _)) = htc_admissible_set(g, v, &allowed) {
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
