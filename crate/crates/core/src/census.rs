//! Property checks over whole families of graphs.
//!
//! Exhaustive mode walks every labeled mixed graph on `n` vertices: one bit
//! per ordered pair for directed edges, then one bit per unordered pair for
//! bidirected edges. Random mode draws graphs from a seeded generator.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::AlgebraError;
use crate::constraints::{expected_generator_count, model_ideal_generators, ConstraintError};
use crate::graph::MixedGraph;
use crate::identify::{edge_count_bound, htc_identify, linear_identify, quasi_linear_vertices};
use crate::model::sample_model_instance;
use crate::recovery::{recover_params, RecoveryError, MAX_SYMBOLIC_VERTICES};

/// Largest `n` accepted for exhaustive enumeration.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 4;
/// Examples of failing graphs kept per property.
const MAX_EXAMPLES: usize = 10;
/// Round-trip tolerance on the relative error of recovered parameters.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
pub struct CensusOptions {
    pub check_generators: bool,
    pub check_recovery: bool,
    pub max_terms: usize,
    pub seed: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            check_generators: true,
            check_recovery: true,
            max_terms: crate::algebra::DEFAULT_MAX_TERMS,
            seed: 0,
        }
    }
}

/// Count of graphs violating one property, with a few of them in text form.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Violations {
    pub count: u64,
    pub examples: Vec<String>,
}

impl Violations {
    fn record(&mut self, g: &MixedGraph) {
        self.count += 1;
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(g.to_text());
        }
    }

    fn merge(mut self, other: Violations) -> Violations {
        self.count += other.count;
        for e in other.examples {
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(e);
            }
        }
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CensusSummary {
    pub graphs: u64,
    pub htc_identifiable: u64,
    pub quasi_linear_only: u64,
    pub not_identifiable: u64,
    pub with_subset_cycles: u64,
    pub generators_checked: u64,
    /// Graphs whose symbolic work hit the term or vertex cap.
    pub symbolic_skipped: u64,
    pub htc_linear_disagree: Violations,
    pub linear_not_quasi: Violations,
    pub invalid_certificate: Violations,
    pub edge_bound_certified: Violations,
    pub generator_count: Violations,
    pub generator_failure: Violations,
    pub recovery_failure: Violations,
    pub max_lambda_error: f64,
    pub max_omega_error: f64,
}

impl CensusSummary {
    pub fn violation_count(&self) -> u64 {
        [
            &self.htc_linear_disagree,
            &self.linear_not_quasi,
            &self.invalid_certificate,
            &self.edge_bound_certified,
            &self.generator_count,
            &self.generator_failure,
            &self.recovery_failure,
        ]
        .iter()
        .map(|v| v.count)
        .sum()
    }

    fn merge(self, o: CensusSummary) -> CensusSummary {
        CensusSummary {
            graphs: self.graphs + o.graphs,
            htc_identifiable: self.htc_identifiable + o.htc_identifiable,
            quasi_linear_only: self.quasi_linear_only + o.quasi_linear_only,
            not_identifiable: self.not_identifiable + o.not_identifiable,
            with_subset_cycles: self.with_subset_cycles + o.with_subset_cycles,
            generators_checked: self.generators_checked + o.generators_checked,
            symbolic_skipped: self.symbolic_skipped + o.symbolic_skipped,
            htc_linear_disagree: self.htc_linear_disagree.merge(o.htc_linear_disagree),
            linear_not_quasi: self.linear_not_quasi.merge(o.linear_not_quasi),
            invalid_certificate: self.invalid_certificate.merge(o.invalid_certificate),
            edge_bound_certified: self.edge_bound_certified.merge(o.edge_bound_certified),
            generator_count: self.generator_count.merge(o.generator_count),
            generator_failure: self.generator_failure.merge(o.generator_failure),
            recovery_failure: self.recovery_failure.merge(o.recovery_failure),
            max_lambda_error: self.max_lambda_error.max(o.max_lambda_error),
            max_omega_error: self.max_omega_error.max(o.max_omega_error),
        }
    }
}

/// Number of labeled mixed graphs on `n` vertices.
pub fn exhaustive_count(n: usize) -> u64 {
    let bits = n * n.saturating_sub(1) + n * n.saturating_sub(1) / 2;
    1u64 << bits
}

/// The graph with the given index in the exhaustive enumeration.
pub fn graph_from_index(n: usize, index: u64) -> MixedGraph {
    let mut bit = 0;
    let mut directed = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                if index >> bit & 1 == 1 {
                    directed.push((i, j));
                }
                bit += 1;
            }
        }
    }
    let mut bidirected = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if index >> bit & 1 == 1 {
                bidirected.push((i, j));
            }
            bit += 1;
        }
    }
    MixedGraph::new(n, directed, bidirected).expect("enumerated graphs are valid")
}

/// Each ordered pair gets a directed edge with probability `p_directed`, each
/// unordered pair a bidirected edge with probability `p_bidirected`. With
/// `acyclic`, only edges `i -> j` with `i < j` are drawn.
pub fn random_graph(n: usize, p_directed: f64, p_bidirected: f64, acyclic: bool, rng: &mut impl Rng) -> MixedGraph {
    let mut directed = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j && (!acyclic || i < j) && rng.random_bool(p_directed) {
                directed.push((i, j));
            }
        }
    }
    let mut bidirected = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.random_bool(p_bidirected) {
                bidirected.push((i, j));
            }
        }
    }
    MixedGraph::new(n, directed, bidirected).expect("generated graphs are valid")
}

/// Edge probabilities used by the random census for `n` vertices: about
/// `1.2 n` directed and `0.6 n` bidirected edges on average.
pub fn default_densities(n: usize) -> (f64, f64) {
    let pairs = (n * n.saturating_sub(1)).max(1) as f64;
    ((1.2 * n as f64 / pairs).min(0.5), (1.2 * n as f64 / pairs).min(0.5))
}

fn is_cap(e: &ConstraintError) -> bool {
    matches!(
        e,
        ConstraintError::Algebra(AlgebraError::TermCap { .. })
            | ConstraintError::Recovery(RecoveryError::Algebra(AlgebraError::TermCap { .. }))
            | ConstraintError::Recovery(RecoveryError::TooManyVertices { .. })
    )
}

fn relative_error(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a - b).abs().max() / b.abs().max().max(1.0)
}

/// Runs every property on a single graph.
pub fn check_graph(g: &MixedGraph, opts: &CensusOptions, instance_seed: u64) -> CensusSummary {
    let mut s = CensusSummary { graphs: 1, ..Default::default() };
    let htc = htc_identify(g);
    let linear = linear_identify(g);
    if htc.is_some() != linear.is_some() {
        s.htc_linear_disagree.record(g);
    }
    let quasi_all = quasi_linear_vertices(g).len() == g.n();
    if linear.is_some() && !quasi_all {
        s.linear_not_quasi.record(g);
    }
    for c in htc.iter().chain(&linear) {
        if c.verify(g).is_err() {
            s.invalid_certificate.record(g);
        }
    }
    let Some(cert) = htc else {
        if quasi_all {
            s.quasi_linear_only += 1;
        } else {
            s.not_identifiable += 1;
        }
        return s;
    };
    s.htc_identifiable += 1;
    s.with_subset_cycles += u64::from(cert.has_subset_cycles());
    if !edge_count_bound(g) {
        s.edge_bound_certified.record(g);
    }
    if opts.check_generators {
        if g.n() > MAX_SYMBOLIC_VERTICES {
            s.symbolic_skipped += 1;
        } else {
            match model_ideal_generators(g, &cert, opts.max_terms) {
                Ok(cs) => {
                    s.generators_checked += 1;
                    if cs.len() as isize != expected_generator_count(g) {
                        s.generator_count.record(g);
                    }
                }
                Err(e) if is_cap(&e) => s.symbolic_skipped += 1,
                Err(_) => s.generator_failure.record(g),
            }
        }
    }
    if opts.check_recovery {
        let (truth, cov) = sample_model_instance(g, instance_seed);
        match recover_params(g, &cert, &cov) {
            Ok(p) => {
                let le = relative_error(&p.lambda, &truth.lambda);
                let oe = relative_error(&p.omega, &truth.omega);
                s.max_lambda_error = le;
                s.max_omega_error = oe;
                if !(le <= ROUND_TRIP_TOLERANCE && oe <= ROUND_TRIP_TOLERANCE) {
                    s.recovery_failure.record(g);
                }
            }
            Err(_) => s.recovery_failure.record(g),
        }
    }
    s
}

fn instance_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Checks every labeled graph on `n <= 4` vertices.
pub fn exhaustive_census(n: usize, opts: &CensusOptions) -> CensusSummary {
    assert!(n <= MAX_EXHAUSTIVE_VERTICES, "exhaustive census is limited to {MAX_EXHAUSTIVE_VERTICES} vertices");
    (0..exhaustive_count(n))
        .into_par_iter()
        .map(|i| check_graph(&graph_from_index(n, i), opts, instance_seed(opts.seed, i)))
        .reduce(CensusSummary::default, CensusSummary::merge)
}

/// The `samples` graphs drawn by the random census, in order.
pub fn random_census_graphs(n: usize, samples: usize, seed: u64) -> Vec<MixedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pd, pb) = default_densities(n);
    (0..samples).map(|_| random_graph(n, pd, pb, false, &mut rng)).collect()
}

/// Checks `samples` seeded random graphs on `n` vertices.
pub fn random_census(n: usize, samples: usize, opts: &CensusOptions) -> CensusSummary {
    let graphs = random_census_graphs(n, samples, opts.seed);
    graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| check_graph(g, opts, instance_seed(opts.seed, i as u64)))
        .reduce(CensusSummary::default, CensusSummary::merge)
}

/// Random graphs on `n` vertices that receive a certificate.
pub fn random_certified_graphs(
    n: usize,
    count: usize,
    acyclic: bool,
    rng: &mut impl Rng,
) -> Vec<(MixedGraph, crate::identify::Certificate)> {
    let (pd, pb) = default_densities(n);
    let mut out = Vec::with_capacity(count);
    let mut seen = BTreeSet::new();
    while out.len() < count {
        let g = random_graph(n, pd, pb, acyclic, rng);
        if let Some(c) = htc_identify(&g) {
            // duplicates are fine but waste samples on tiny n
            if seen.insert(g.to_text()) || n <= 3 {
                out.push((g, c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_enumeration_is_a_bijection() {
        let n = 3;
        let texts: BTreeSet<String> = (0..exhaustive_count(n)).map(|i| graph_from_index(n, i).to_text()).collect();
        assert_eq!(texts.len() as u64, exhaustive_count(n));
        assert_eq!(exhaustive_count(4), 262_144);
        assert_eq!(graph_from_index(4, 0), MixedGraph::empty(4));
    }

    #[test]
    fn two_vertex_census() {
        let s = exhaustive_census(2, &CensusOptions::default());
        assert_eq!(s.graphs, 8);
        assert_eq!(s.violation_count(), 0, "{s:#?}");
        // empty, 1 -> 2, 2 -> 1, and 1 <-> 2 alone
        assert_eq!(s.htc_identifiable, 4);
    }

    #[test]
    fn three_vertex_census() {
        let s = exhaustive_census(3, &CensusOptions::default());
        assert_eq!(s.graphs, 512);
        assert_eq!(s.violation_count(), 0, "{s:#?}");
    }

    #[test]
    fn random_census_is_reproducible() {
        let opts = CensusOptions { seed: 5, ..Default::default() };
        let a = random_census(5, 30, &opts);
        let b = random_census(5, 30, &opts);
        assert_eq!(a, b);
        assert_eq!(a.violation_count(), 0, "{a:#?}");
    }
}
