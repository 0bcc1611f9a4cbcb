//! Trek enumeration for acyclic mixed graphs.
//!
//! A trek from `v` to `w` climbs from `v` against the arrows to a top, then
//! descends along the arrows to `w`. The top is either one shared source vertex
//! or a bidirected edge joining the two sides.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graph::MixedGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrekError {
    #[error("trek sets are infinite on graphs with directed cycles")]
    Cyclic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bridge {
    /// Both sides start at this vertex.
    Source(usize),
    /// The left side tops out at `.0`, the right side starts at `.1`.
    Bidirected(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trek {
    /// From the trek's start up to the top of the left side, walked against
    /// the arrows.
    pub left: Vec<usize>,
    /// From the top of the right side down to the trek's end.
    pub right: Vec<usize>,
    pub bridge: Bridge,
}

/// `omega_{ab} * prod lambda_{xy}` for a single trek.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrekMonomial {
    pub omega: (usize, usize),
    pub lambdas: Vec<(usize, usize)>,
}

impl Trek {
    pub fn is_half_trek(&self) -> bool {
        self.left.len() == 1
    }

    /// Directed edges used by the trek, left side first.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let up = self.left.windows(2).map(|w| (w[1], w[0]));
        let down = self.right.windows(2).map(|w| (w[0], w[1]));
        up.chain(down).collect()
    }

    pub fn monomial(&self) -> TrekMonomial {
        let omega = match self.bridge {
            Bridge::Source(t) => (t, t),
            Bridge::Bidirected(a, b) => (a.min(b), a.max(b)),
        };
        TrekMonomial { omega, lambdas: self.directed_edges() }
    }
}

impl TrekMonomial {
    /// Numeric value for 0-indexed `lambda` / `omega` matrices.
    pub fn value(&self, lambda: &DMatrix<f64>, omega: &DMatrix<f64>) -> f64 {
        let (a, b) = self.omega;
        self.lambdas
            .iter()
            .fold(omega[(a - 1, b - 1)], |acc, &(x, y)| acc * lambda[(x - 1, y - 1)])
    }
}

impl std::fmt::Display for TrekMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "w_{}_{}", self.omega.0, self.omega.1)?;
        let mut sorted = self.lambdas.clone();
        sorted.sort_unstable();
        for (x, y) in sorted {
            write!(f, "*l_{x}_{y}")?;
        }
        Ok(())
    }
}

/// All directed paths of an acyclic graph, keyed by (start, end). Length-zero
/// paths are included.
struct PathTable {
    paths: BTreeMap<(usize, usize), Vec<Vec<usize>>>,
}

impl PathTable {
    fn new(g: &MixedGraph) -> Self {
        let mut paths: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
        for start in g.vertices() {
            let mut stack = vec![vec![start]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                for &c in g.children(last) {
                    let mut next = path.clone();
                    next.push(c);
                    stack.push(next);
                }
                paths.entry((start, last)).or_default().push(path);
            }
        }
        PathTable { paths }
    }

    fn get(&self, from: usize, to: usize) -> &[Vec<usize>] {
        self.paths.get(&(from, to)).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Every trek from `v` to `w`, sorted by `(left, right)` vertex sequences.
pub fn enumerate_treks(g: &MixedGraph, v: usize, w: usize) -> Result<Vec<Trek>, TrekError> {
    if !g.is_acyclic() {
        return Err(TrekError::Cyclic);
    }
    let table = PathTable::new(g);
    Ok(treks_from_table(g, &table, v, w))
}

fn treks_from_table(g: &MixedGraph, table: &PathTable, v: usize, w: usize) -> Vec<Trek> {
    let reversed = |p: &Vec<usize>| p.iter().rev().copied().collect::<Vec<_>>();
    let mut treks = Vec::new();
    for top in g.vertices() {
        for up in table.get(top, v) {
            for down in table.get(top, w) {
                treks.push(Trek { left: reversed(up), right: down.clone(), bridge: Bridge::Source(top) });
            }
        }
    }
    for &(a, b) in g.bidirected() {
        for (l, r) in [(a, b), (b, a)] {
            for up in table.get(l, v) {
                for down in table.get(r, w) {
                    treks.push(Trek {
                        left: reversed(up),
                        right: down.clone(),
                        bridge: Bridge::Bidirected(l, r),
                    });
                }
            }
        }
    }
    treks.sort_by(|x, y| (&x.left, &x.right).cmp(&(&y.left, &y.right)));
    treks
}

/// Trek sets for every ordered pair, computed from one shared path table.
pub fn all_treks(g: &MixedGraph) -> Result<BTreeMap<(usize, usize), Vec<Trek>>, TrekError> {
    if !g.is_acyclic() {
        return Err(TrekError::Cyclic);
    }
    let table = PathTable::new(g);
    let mut out = BTreeMap::new();
    for v in g.vertices() {
        for w in g.vertices() {
            out.insert((v, w), treks_from_table(g, &table, v, w));
        }
    }
    Ok(out)
}
