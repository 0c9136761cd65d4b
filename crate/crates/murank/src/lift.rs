//! The directed-edge lift of an undirected graph and its matrix-free
//! walk operators.
//!
//! Every undirected edge {u, v} becomes two directed edges u->v and v->u.
//! A walk on the lift moves probability mass from a directed edge e to the
//! edges leaving `head(e)`, with the immediate reversal weighted by the
//! backtrack parameter mu:
//!
//! ```text
//! w(e -> f) = mu / (d_head(e) - 1 + mu)   if f = reverse(e)
//!           = 1  / (d_head(e) - 1 + mu)   otherwise
//! ```
//!
//! The resulting operator is column stochastic (mass-preserving) for every
//! mu > 0; at mu = 0 edges whose head has degree 1 have no successor and
//! are treated as dangling, with their mass repaired by the solver's
//! teleportation step. mu = 1 reproduces the plain edge walk, mu = 0 the
//! non-backtracking walk.

use thiserror::Error;

use crate::graph::Graph;
use crate::parallel;

#[derive(Debug, Error, PartialEq)]
pub enum LiftError {
    #[error("edge lift requires at least one edge")]
    EmptyEdgeSet,
    #[error("backtrack weight mu must be nonnegative, got {0}")]
    NegativeMu(f64),
    #[error("distribution has wrong length: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("distribution entry {index} is negative")]
    NegativeEntry { index: usize },
    #[error("distribution sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("node {0} carries teleport mass but has degree 0")]
    MassOnIsolatedNode(usize),
}

/// How a node distribution is projected into edge space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiftMode {
    /// `u[e] = v[tail(e)] / d_tail(e)`; exactly unit l1 norm.
    #[default]
    TailDegree,
    /// `u[e] = v[head(e)] / sum_f v[head(f)]`: each node's mass is copied to
    /// every edge pointing at it, then renormalized.
    HeadCopy,
}

/// Tolerance for accepting an input distribution as normalized.
const DISTRIBUTION_TOL: f64 = 1e-9;

/// The 2m directed edges of a graph with head/tail/reverse indexing and
/// per-tail adjacency, in a deterministic order: the undirected edge (u, v)
/// with u < v at sorted rank t yields directed edge u->v at index 2t and
/// v->u at index 2t + 1, so `reverse(e) == e ^ 1`.
#[derive(Debug, Clone)]
pub struct EdgeLift {
    n: usize,
    tail: Vec<usize>,
    head: Vec<usize>,
    head_degree: Vec<usize>,
    out_offsets: Vec<usize>,
    out_edges: Vec<usize>,
}

impl EdgeLift {
    pub fn from_graph(g: &Graph) -> Result<Self, LiftError> {
        let m = g.edge_count();
        if m == 0 {
            return Err(LiftError::EmptyEdgeSet);
        }
        let n = g.node_count();
        let mut tail = Vec::with_capacity(2 * m);
        let mut head = Vec::with_capacity(2 * m);
        for &(u, v) in g.edges() {
            tail.push(u);
            head.push(v);
            tail.push(v);
            head.push(u);
        }
        let head_degree: Vec<usize> = head.iter().map(|&h| g.degree(h)).collect();

        // group edge indices by tail node
        let mut out_offsets = vec![0usize; n + 1];
        for v in 0..n {
            out_offsets[v + 1] = out_offsets[v] + g.degree(v);
        }
        let mut cursor = out_offsets.clone();
        let mut out_edges = vec![0usize; 2 * m];
        for (e, &t) in tail.iter().enumerate() {
            out_edges[cursor[t]] = e;
            cursor[t] += 1;
        }

        Ok(EdgeLift {
            n,
            tail,
            head,
            head_degree,
            out_offsets,
            out_edges,
        })
    }

    /// Number of directed edges (2m).
    pub fn edge_count(&self) -> usize {
        self.tail.len()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn tail(&self, e: usize) -> usize {
        self.tail[e]
    }

    pub fn head(&self, e: usize) -> usize {
        self.head[e]
    }

    /// Degree of `head(e)` in the underlying graph: the diagonal of the
    /// edge-degree matrix.
    pub fn head_degree(&self, e: usize) -> usize {
        self.head_degree[e]
    }

    /// The involution pairing each directed edge with its reversal.
    pub fn reverse(&self, e: usize) -> usize {
        e ^ 1
    }

    /// Edge indices leaving node `v` (tail = v).
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Degree of node `v` in the underlying graph.
    pub fn degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    /// Total mass sitting on dangling edges (head of degree 1); only those
    /// lose mass under the mu = 0 transition.
    pub fn dangling_mass(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.head_degree)
            .filter(|&(_, &d)| d == 1)
            .map(|(&xe, _)| xe)
            .sum()
    }

    /// One step of the column-stochastic edge walk: mass on edge e moves to
    /// the edges leaving head(e) with the backtrack edge weighted mu.
    /// At mu = 0, dangling edges contribute nothing (solver repairs them).
    pub fn apply_transition(&self, mu: f64, x: &[f64]) -> Result<Vec<f64>, LiftError> {
        if mu < 0.0 || mu.is_nan() {
            return Err(LiftError::NegativeMu(mu));
        }
        if x.len() != self.edge_count() {
            return Err(LiftError::LengthMismatch {
                expected: self.edge_count(),
                got: x.len(),
            });
        }
        let mut node_in_sum = vec![0.0; self.n];
        let mut y = vec![0.0; self.edge_count()];
        self.transition_into(mu, x, &mut node_in_sum, &mut y);
        Ok(y)
    }

    /// Scratch-buffer variant used inside solver loops. `node_in_sum` must
    /// have length n and `y` length 2m; `mu >= 0` is the caller's job.
    pub(crate) fn transition_into(
        &self,
        mu: f64,
        x: &[f64],
        node_in_sum: &mut [f64],
        y: &mut [f64],
    ) {
        // in-edges of v are exactly the reversals of its out-edges
        parallel::fill_indexed(node_in_sum, |v| {
            self.out_edges(v).iter().map(|&f| x[f ^ 1]).sum()
        });
        // All edges feeding f share the head node tail(f), whose degree is
        // head_degree(reverse(f)); the reverse of f is the unique backtrack
        // contributor.
        parallel::fill_indexed(y, |f| {
            let d = self.head_degree[f ^ 1];
            if d == 1 {
                // sole in-edge is the reverse: dangling at mu = 0, a forced
                // bounce (weight exactly 1) otherwise
                if mu == 0.0 {
                    0.0
                } else {
                    x[f ^ 1]
                }
            } else {
                (node_in_sum[self.tail[f]] + (mu - 1.0) * x[f ^ 1]) / (d as f64 - 1.0 + mu)
            }
        });
    }

    /// Projects a node distribution into edge space.
    pub fn lift_distribution(&self, v: &[f64], mode: LiftMode) -> Result<Vec<f64>, LiftError> {
        if v.len() != self.n {
            return Err(LiftError::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let mut sum = 0.0;
        for (i, &vi) in v.iter().enumerate() {
            if vi < 0.0 || vi.is_nan() {
                return Err(LiftError::NegativeEntry { index: i });
            }
            if vi > 0.0 && self.degree(i) == 0 {
                return Err(LiftError::MassOnIsolatedNode(i));
            }
            sum += vi;
        }
        if (sum - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(LiftError::NotNormalized { sum });
        }
        match mode {
            LiftMode::TailDegree => Ok(self
                .tail
                .iter()
                .map(|&t| v[t] / self.degree(t) as f64)
                .collect()),
            LiftMode::HeadCopy => {
                let total: f64 = self.head.iter().map(|&h| v[h]).sum();
                Ok(self.head.iter().map(|&h| v[h] / total).collect())
            }
        }
    }

    /// Sums edge mass onto tail nodes (the T projection); preserves the l1
    /// norm of nonnegative vectors since every edge has exactly one tail.
    pub fn project_to_nodes(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        parallel::fill_indexed(&mut out, |v| self.out_edges(v).iter().map(|&e| y[e]).sum());
        out
    }
}
