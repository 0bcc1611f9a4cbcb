//! Directed mixed graphs `G = (V, D, B)` on vertices `1..=n`.
//!
//! Directed edges `i -> j` carry the edge coefficients of the structural
//! equations, bidirected edges `i <-> j` mark correlated error terms. Loops are
//! not allowed in either edge set.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors produced while building or parsing a [`MixedGraph`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop edge at vertex {0}")]
    Loop(usize),
    #[error("duplicate edge {0}")]
    DuplicateEdge(String),
}

/// A directed mixed graph with sorted, canonical edge sets.
///
/// Bidirected pairs are stored as `(i, j)` with `i < j`. Adjacency lists are
/// precomputed and sorted ascending, so every query returns vertices in index
/// order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct MixedGraph {
    n: usize,
    directed: BTreeSet<(usize, usize)>,
    bidirected: BTreeSet<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    siblings: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertices: usize,
    directed: Vec<(usize, usize)>,
    bidirected: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for MixedGraph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        MixedGraph::new(raw.vertices, raw.directed, raw.bidirected)
    }
}

impl From<MixedGraph> for RawGraph {
    fn from(g: MixedGraph) -> Self {
        RawGraph {
            vertices: g.n,
            directed: g.directed.into_iter().collect(),
            bidirected: g.bidirected.into_iter().collect(),
        }
    }
}

impl MixedGraph {
    /// Builds a graph, rejecting loops, out-of-range endpoints and duplicates.
    /// A bidirected edge given twice in either orientation is a duplicate.
    pub fn new(
        n: usize,
        directed: impl IntoIterator<Item = (usize, usize)>,
        bidirected: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut d = BTreeSet::new();
        for (i, j) in directed {
            check_endpoints(n, i, j)?;
            if !d.insert((i, j)) {
                return Err(GraphError::DuplicateEdge(format!("{i} -> {j}")));
            }
        }
        let mut b = BTreeSet::new();
        for (i, j) in bidirected {
            check_endpoints(n, i, j)?;
            if !b.insert((i.min(j), i.max(j))) {
                return Err(GraphError::DuplicateEdge(format!("{i} <-> {j}")));
            }
        }
        Ok(Self::from_canonical(n, d, b))
    }

    /// Graph on `n` vertices without edges.
    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, BTreeSet::new(), BTreeSet::new())
    }

    fn from_canonical(
        n: usize,
        directed: BTreeSet<(usize, usize)>,
        bidirected: BTreeSet<(usize, usize)>,
    ) -> Self {
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut siblings = vec![Vec::new(); n];
        for &(i, j) in &directed {
            parents[j - 1].push(i);
            children[i - 1].push(j);
        }
        for &(i, j) in &bidirected {
            siblings[i - 1].push(j);
            siblings[j - 1].push(i);
        }
        for list in parents.iter_mut().chain(&mut children).chain(&mut siblings) {
            list.sort_unstable();
        }
        MixedGraph { n, directed, bidirected, parents, children, siblings }
    }

    /// Returns a copy with one more bidirected edge.
    pub fn with_bidirected(&self, i: usize, j: usize) -> Result<Self, GraphError> {
        check_endpoints(self.n, i, j)?;
        let mut b = self.bidirected.clone();
        if !b.insert((i.min(j), i.max(j))) {
            return Err(GraphError::DuplicateEdge(format!("{i} <-> {j}")));
        }
        Ok(Self::from_canonical(self.n, self.directed.clone(), b))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    pub fn directed(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn bidirected(&self) -> &BTreeSet<(usize, usize)> {
        &self.bidirected
    }

    pub fn has_directed(&self, i: usize, j: usize) -> bool {
        self.directed.contains(&(i, j))
    }

    pub fn has_bidirected(&self, i: usize, j: usize) -> bool {
        self.bidirected.contains(&(i.min(j), i.max(j)))
    }

    pub fn num_edges(&self) -> usize {
        self.directed.len() + self.bidirected.len()
    }

    /// `pa(v)`, ascending.
    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v - 1]
    }

    /// `ch(v)`, ascending.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v - 1]
    }

    /// `sib(v)`, ascending.
    pub fn siblings(&self, v: usize) -> &[usize] {
        &self.siblings[v - 1]
    }

    pub fn is_bow_free(&self) -> bool {
        self.bidirected
            .iter()
            .all(|&(i, j)| !self.has_directed(i, j) && !self.has_directed(j, i))
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Kahn's algorithm taking the smallest available vertex first, so the
    /// order is unique for a given graph. `None` when a directed cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> =
            self.vertices().filter(|&v| indegree[v - 1] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in self.children(v) {
                indegree[c - 1] -= 1;
                if indegree[c - 1] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    /// Vertices reachable from `start` along directed edges, `start` included
    /// (paths of length zero count).
    pub fn descendants_inclusive(&self, start: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &c in self.children(u) {
                if seen.insert(c) {
                    queue.push_back(c);
                }
            }
        }
        seen
    }

    /// `htr(v)`: vertices reached from `v` by a half-trek with at least one
    /// edge. These are the proper descendants of `v` together with everything
    /// directed-reachable (length zero allowed) from a sibling of `v`. In a
    /// cyclic graph `v` itself can be a member.
    pub fn half_trek_reachable(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        for &w in self.children(v).iter().chain(self.siblings(v)) {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &c in self.children(u) {
                if seen.insert(c) {
                    queue.push_back(c);
                }
            }
        }
        seen
    }

    /// Canonical text form, parseable by [`MixedGraph::from_str`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn check_endpoints(n: usize, i: usize, j: usize) -> Result<(), GraphError> {
    for v in [i, j] {
        if v == 0 || v > n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n });
        }
    }
    if i == j {
        return Err(GraphError::Loop(i));
    }
    Ok(())
}

impl fmt::Display for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.n)?;
        for (i, j) in &self.directed {
            writeln!(f, "{i} -> {j}")?;
        }
        for (i, j) in &self.bidirected {
            writeln!(f, "{i} <-> {j}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.directed.iter().map(|(i, j)| format!("{i}->{j}")).collect();
        let b: Vec<String> = self.bidirected.iter().map(|(i, j)| format!("{i}<->{j}")).collect();
        write!(f, "MixedGraph(n={}, D=[{}], B=[{}])", self.n, d.join(","), b.join(","))
    }
}

/// Parses the graph file format:
///
/// ```text
/// # the instrumental variable model
/// vertices 3
/// 1 -> 2
/// 2 -> 3
/// 2 <-> 3
/// ```
///
/// `#` starts a comment, blank lines are ignored and whitespace around tokens
/// is insignificant. Errors carry the 1-based line number.
impl FromStr for MixedGraph {
    type Err = GraphError;

    fn from_str(text: &str) -> Result<Self, GraphError> {
        let mut n: Option<usize> = None;
        let mut directed = BTreeSet::new();
        let mut bidirected = BTreeSet::new();
        let parse_err = |line: usize, message: String| GraphError::Parse { line, message };

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some(n) = n else {
                let rest = content
                    .strip_prefix("vertices")
                    .ok_or_else(|| parse_err(line_no, "expected `vertices N`".into()))?;
                let count = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(line_no, format!("bad vertex count `{}`", rest.trim())))?;
                n = Some(count);
                continue;
            };

            let (lhs, rhs, bi) = if let Some((a, b)) = content.split_once("<->") {
                (a, b, true)
            } else if let Some((a, b)) = content.split_once("->") {
                (a, b, false)
            } else {
                return Err(parse_err(line_no, format!("expected an edge, got `{content}`")));
            };
            let endpoint = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(line_no, format!("bad vertex `{}`", s.trim())))
            };
            let (i, j) = (endpoint(lhs)?, endpoint(rhs)?);
            check_endpoints(n, i, j).map_err(|e| parse_err(line_no, e.to_string()))?;
            let fresh = if bi {
                bidirected.insert((i.min(j), i.max(j)))
            } else {
                directed.insert((i, j))
            };
            if !fresh {
                let arrow = if bi { "<->" } else { "->" };
                return Err(parse_err(line_no, format!("duplicate edge {i} {arrow} {j}")));
            }
        }

        let n = n.ok_or_else(|| parse_err(text.lines().count().max(1), "missing `vertices N`".into()))?;
        Ok(MixedGraph::from_canonical(n, directed, bidirected))
    }
}

/// Parses graph-file contents.
pub fn parse_graph(text: &str) -> Result<MixedGraph, GraphError> {
    text.parse()
}
