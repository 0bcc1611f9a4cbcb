//! Unit-capacity max-flow with BFS augmenting paths.
//!
//! Small dense-ish networks only (a few dozen nodes), so a plain edge list
//! with residual capacities is enough. Neighbours are scanned in insertion
//! order, which makes the augmenting paths and therefore the final flow
//! deterministic.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
    forward: bool,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { adj: vec![Vec::new(); nodes] }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds an arc and returns its handle `(from, index)`.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: u32) -> (usize, usize) {
        let fwd = self.adj[from].len();
        let back = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Arc { to, cap, rev: back, forward: true });
        self.adj[to].push(Arc { to: from, cap: 0, rev: fwd, forward: false });
        (from, fwd)
    }

    /// Flow currently carried by the arc, assuming its original capacity
    /// was `original`.
    pub fn flow_on(&self, handle: (usize, usize), original: u32) -> u32 {
        original - self.adj[handle.0][handle.1].cap
    }

    /// Sets the residual capacity of an arc that carries no flow to zero.
    pub fn disable(&mut self, handle: (usize, usize)) {
        let arc = &self.adj[handle.0][handle.1];
        assert_eq!(self.adj[arc.to][arc.rev].cap, 0, "arc carries flow");
        self.adj[handle.0][handle.1].cap = 0;
    }

    /// Finds one augmenting path from `source` to `sink` and pushes a unit
    /// along it. Returns `false` when none exists.
    pub fn augment_once(&mut self, source: usize, sink: usize) -> bool {
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        'bfs: while let Some(u) = queue.pop_front() {
            for (k, arc) in self.adj[u].iter().enumerate() {
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    pred[arc.to] = Some((u, k));
                    if arc.to == sink {
                        break 'bfs;
                    }
                    queue.push_back(arc.to);
                }
            }
        }
        if !seen[sink] {
            return false;
        }
        let mut v = sink;
        while let Some((u, k)) = pred[v] {
            let rev = self.adj[u][k].rev;
            self.adj[u][k].cap -= 1;
            self.adj[v][rev].cap += 1;
            v = u;
        }
        true
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> u32 {
        let mut total = 0;
        while self.augment_once(source, sink) {
            total += 1;
        }
        total
    }

    /// Targets of forward arcs out of `u` that carry positive flow.
    pub fn flow_targets(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().filter(|a| a.forward && self.adj[a.to][a.rev].cap > 0).map(|a| a.to)
    }

    fn first_flow_target(&self, u: usize) -> Option<usize> {
        self.flow_targets(u).next()
    }

    /// Pushes one unit back along the forward arc `u -> v`. Used when walking
    /// a flow decomposition.
    fn consume(&mut self, u: usize, v: usize) {
        let k = self.adj[u]
            .iter()
            .position(|a| a.forward && a.to == v && self.adj[v][a.rev].cap > 0)
            .expect("arc carries flow");
        let rev = self.adj[u][k].rev;
        self.adj[u][k].cap += 1;
        self.adj[v][rev].cap -= 1;
    }

    /// Decomposes the current flow into `source -> sink` paths. The network's
    /// flow is left at zero afterwards.
    pub fn decompose(&mut self, source: usize, sink: usize) -> Vec<Vec<usize>> {
        let mut paths = Vec::new();
        loop {
            let Some(first) = self.first_flow_target(source) else { break };
            let mut path = vec![source, first];
            self.consume(source, first);
            let mut u = first;
            while u != sink {
                let next = self.first_flow_target(u).expect("flow conservation");
                self.consume(u, next);
                path.push(next);
                u = next;
            }
            paths.push(path);
        }
        paths
    }
}
