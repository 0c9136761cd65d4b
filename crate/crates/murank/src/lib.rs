//! PageRank and its backtrack-weighted variants on the directed-edge lift
//! of an undirected graph.
//!
//! The crate covers:
//!
//! - [`graph`]: immutable simple graphs in CSR form plus random generators
//!   ([`generate`]) for SBM, k-regular, bipartite biregular, G(n, p) and
//!   Pareto-weight Chung-Lu models.
//! - [`lift`]: the 2m directed edges of a graph with matrix-free walk
//!   operators; the backtrack edge is weighted by a parameter mu.
//! - [`solver`]: standard PageRank, mu-PageRank (mu = 0 non-backtracking,
//!   mu = 1 standard), the closed-form mu -> infinity limit, and the exact
//!   bipartite biregular formula.
//! - [`experiment`]: mu sweeps with per-node monotonicity verdicts, top-k
//!   overlap studies, and a Monte Carlo edge-walk simulator.
//! - [`cluster`]: infinity-PageRank clustering with NMI and best-match
//!   accuracy metrics.
//! - [`io`]: edge-list and GML parsers.
//!
//! Graphs and lifts are immutable after construction and all solvers are
//! pure functions of their inputs, so everything can be shared across
//! threads. With the default `parallel` feature, trials, restarts, sweep
//! grids and the large per-edge kernels run on rayon; results are
//! bit-identical to the sequential build.

pub mod cluster;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod io;
pub mod lift;
pub mod solver;

mod parallel;

pub use cluster::{ClusterModel, PersonalizedBasis};
pub use generate::{GeneratedGraph, GeneratorSpec};
pub use graph::Graph;
pub use lift::{EdgeLift, LiftMode};
pub use solver::{Method, Mu, PageRankConfig, PageRankVector, Space, Teleport};
