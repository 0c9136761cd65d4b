//! Immutable undirected simple graphs in compressed sparse adjacency form.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },
}

/// An undirected, unweighted simple graph with dense 0-based node ids.
///
/// Neighbor lists are stored in CSR layout and kept sorted, edges are
/// deduplicated and normalized to `u < v`, and connectivity is computed
/// once at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    degrees: Vec<usize>,
    connected: bool,
}

impl Graph {
    /// Builds a graph from undirected edge pairs. Pairs may arrive in either
    /// orientation and duplicates (including reversed duplicates) collapse.
    pub fn from_edges(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for &(u, v) in pairs {
            if u >= n {
                return Err(GraphError::IndexOutOfRange { index: u, n });
            }
            if v >= n {
                return Err(GraphError::IndexOutOfRange { index: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();

        let mut degrees = vec![0usize; n];
        for &(u, v) in &edges {
            degrees[u] += 1;
            degrees[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degrees[v];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0usize; 2 * edges.len()];
        for &(u, v) in &edges {
            neighbors[cursor[u]] = v;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            cursor[v] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }

        let mut g = Graph {
            n,
            edges,
            offsets,
            neighbors,
            degrees,
            connected: false,
        };
        g.connected = g.compute_connected();
        Ok(g)
    }

    fn compute_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of undirected edges `m`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn min_degree(&self) -> usize {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    /// Restricts the graph to nodes of degree >= 1. Returns the subgraph and
    /// the original index of each kept node.
    pub fn without_isolated(&self) -> Option<(Graph, Vec<usize>)> {
        let kept: Vec<usize> = (0..self.n).filter(|&v| self.degrees[v] > 0).collect();
        if kept.is_empty() {
            return None;
        }
        let mut remap = vec![usize::MAX; self.n];
        for (new, &old) in kept.iter().enumerate() {
            remap[old] = new;
        }
        let pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| (remap[u], remap[v]))
            .collect();
        let g = Graph::from_edges(kept.len(), &pairs).expect("subgraph of a valid graph");
        Some((g, kept))
    }
}
