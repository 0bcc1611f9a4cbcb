//! Named example graphs used throughout the tests and in `examples/graphs/`.

use crate::graph::MixedGraph;

fn build(n: usize, d: &[(usize, usize)], b: &[(usize, usize)]) -> MixedGraph {
    MixedGraph::new(n, d.iter().copied(), b.iter().copied()).expect("fixture graphs are valid")
}

/// Instrumental variable model: `1 -> 2 -> 3`, `2 <-> 3`.
pub fn iv() -> MixedGraph {
    build(3, &[(1, 2), (2, 3)], &[(2, 3)])
}

/// Latent projection of the Verma graph: `1 -> 2 -> 3 -> 4`, `1 -> 3`, `2 <-> 4`.
pub fn verma() -> MixedGraph {
    build(4, &[(1, 2), (2, 3), (3, 4), (1, 3)], &[(2, 4)])
}

/// The gadget graph whose single constraint is not found by conditional
/// independence reasoning.
pub fn gadget() -> MixedGraph {
    build(4, &[(1, 3), (2, 4)], &[(1, 2), (1, 4), (2, 3)])
}

/// Complete DAG on three vertices, linearly identifiable.
pub fn saturated_triangle() -> MixedGraph {
    build(3, &[(1, 2), (2, 3), (1, 3)], &[])
}

/// Vertex 1 pointing into 2, 3, 4 with a bow on every edge. 2-identifiable.
pub fn three_bows() -> MixedGraph {
    build(4, &[(1, 2), (1, 3), (1, 4)], &[(1, 2), (1, 3), (1, 4)])
}

/// `1 -> 2 -> 3` with `1 <-> 2`: quasi-linearly but not linearly identifiable.
pub fn quasi_linear_chain() -> MixedGraph {
    build(3, &[(1, 2), (2, 3)], &[(1, 2)])
}

/// HTC-identifiable graph with the directed cycle `2 -> 3 -> 2`.
pub fn cyclic_five() -> MixedGraph {
    build(5, &[(1, 2), (2, 3), (3, 2), (3, 4), (4, 5)], &[(1, 2), (3, 4), (1, 4), (4, 5), (1, 5)])
}

/// Generically identifiable but not HTC-identifiable.
pub fn inconclusive_five() -> MixedGraph {
    build(5, &[(1, 2), (1, 3), (1, 4), (4, 5)], &[(1, 2), (1, 3), (1, 4), (1, 5)])
}

/// HTC-identifiable only through sets with a subset cycle; adding `1 <-> 4`
/// destroys identifiability.
pub fn subset_cycle_six() -> MixedGraph {
    build(
        6,
        &[(2, 3), (4, 5), (6, 1)],
        &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 6), (3, 6), (2, 5), (5, 6)],
    )
}

/// [`subset_cycle_six`] with the extra bidirected edge `1 <-> 4`.
pub fn subset_cycle_six_plus() -> MixedGraph {
    subset_cycle_six().with_bidirected(1, 4).expect("edge is new")
}

/// Complete DAG `i -> j` for all `i < j`.
pub fn complete_dag(n: usize) -> MixedGraph {
    let d: Vec<(usize, usize)> =
        (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    build(n, &d, &[])
}

pub fn all() -> Vec<MixedGraph> {
    vec![
        iv(),
        verma(),
        gadget(),
        saturated_triangle(),
        three_bows(),
        quasi_linear_chain(),
        cyclic_five(),
        inconclusive_five(),
        subset_cycle_six(),
        subset_cycle_six_plus(),
        complete_dag(4),
        MixedGraph::empty(2),
    ]
}
