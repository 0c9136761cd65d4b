//! Stationary-distribution solvers for the PageRank family.
//!
//! Everything here follows one convention: column-stochastic operators
//! acting on probability column vectors. The standard chain iterates
//! `x <- eps * A D^-1 x + (1 - eps) * v` on nodes; the mu-chain iterates
//! the lifted edge walk with the dangling repair
//! `x <- eps * (M x + dangling_mass * u) + (1 - eps) * u` and projects the
//! stationary edge vector back onto nodes by tails. The mu -> infinity
//! limit has the closed form
//! `pi = v / (1 + eps) + eps / (1 + eps) * A D^-1 v`, evaluated directly
//! in O(n + m).

use thiserror::Error;

use crate::graph::Graph;
use crate::lift::{EdgeLift, LiftError, LiftMode};
use crate::parallel;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    BadEpsilon(f64),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("node {0} is isolated; the walk matrix is undefined")]
    IsolatedNode(usize),
    #[error("no convergence after {iterations} iterations, residual {residual:e}")]
    NotConverged { residual: f64, iterations: usize },
    #[error("infeasible biregular shape: n1*d1 = {left} but n2*d2 = {right}")]
    InfeasibleBiregular { left: usize, right: usize },
    #[error("biregular parts and degrees must be at least 1")]
    DegenerateBiregular,
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// Index space of a PageRank vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Node,
    Edge,
}

/// Backtrack weight, with an explicit sentinel for the mu -> infinity limit
/// (which is solved in closed form rather than by a large finite mu).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mu {
    Finite(f64),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Fixed-point iteration of the damped walk; l1 difference of successive
    /// iterates below `tol` stops it.
    #[default]
    Power,
    /// Partial sums of the Neumann series `sum_r eps^r M^r (1 - eps) v`,
    /// stopped when the term norm drops below `tol`.
    LinearSeries,
}

/// Teleportation distribution over nodes.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Teleport {
    #[default]
    Uniform,
    Custom(Vec<f64>),
}

impl Teleport {
    fn materialize(&self, n: usize) -> Vec<f64> {
        match self {
            Teleport::Uniform => vec![1.0 / n as f64; n],
            Teleport::Custom(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankConfig {
    pub epsilon: f64,
    pub mu: Mu,
    pub teleport: Teleport,
    pub mode: LiftMode,
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
}

impl PageRankConfig {
    pub fn new(epsilon: f64) -> Self {
        PageRankConfig {
            epsilon,
            mu: Mu::Finite(1.0),
            teleport: Teleport::Uniform,
            mode: LiftMode::TailDegree,
            method: Method::Power,
            tol: 1e-12,
            max_iter: 100_000,
        }
    }

    fn validate(&self) -> Result<(), SolveError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(SolveError::BadEpsilon(self.epsilon));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(SolveError::BadTolerance(self.tol));
        }
        if let Mu::Finite(mu) = self.mu {
            if mu < 0.0 || mu.is_nan() {
                return Err(SolveError::Lift(LiftError::NegativeMu(mu)));
            }
        }
        Ok(())
    }
}

/// A nonnegative node- or edge-indexed vector with unit l1 norm, plus the
/// solver's convergence record.
#[derive(Debug, Clone, PartialEq)]
pub struct PageRankVector {
    pub values: Vec<f64>,
    pub space: Space,
    pub residual: f64,
    pub iterations: usize,
}

/// Edge stationary vector and its node projection, as returned by
/// [`mu_pagerank`].
#[derive(Debug, Clone, PartialEq)]
pub struct MuPageRank {
    pub node: PageRankVector,
    pub edge: PageRankVector,
}

fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn normalize(values: &mut [f64]) {
    let sum: f64 = values.iter().sum();
    if sum > 0.0 {
        for x in values.iter_mut() {
            *x /= sum;
        }
    }
}

fn check_degrees(g: &Graph) -> Result<(), SolveError> {
    if let Some(v) = (0..g.node_count()).find(|&v| g.degree(v) == 0) {
        return Err(SolveError::IsolatedNode(v));
    }
    Ok(())
}

fn check_node_distribution(g: &Graph, v: &[f64]) -> Result<(), SolveError> {
    if v.len() != g.node_count() {
        return Err(SolveError::Lift(LiftError::LengthMismatch {
            expected: g.node_count(),
            got: v.len(),
        }));
    }
    let mut sum = 0.0;
    for (i, &vi) in v.iter().enumerate() {
        if vi < 0.0 || vi.is_nan() {
            return Err(SolveError::Lift(LiftError::NegativeEntry { index: i }));
        }
        sum += vi;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(SolveError::Lift(LiftError::NotNormalized { sum }));
    }
    Ok(())
}

/// Runs either solver method on a generic column-stochastic step.
///
/// `walk(x, y)` must write the walk part `M x` into `y` (without damping or
/// teleportation); `u` is the teleport distribution in the same space. At
/// mu = 0 the walk may lose mass on dangling states, which is re-injected
/// through `u` to keep the chain stochastic.
fn solve_chain<F>(
    u: &[f64],
    epsilon: f64,
    method: Method,
    tol: f64,
    max_iter: usize,
    mut walk: F,
) -> Result<(Vec<f64>, f64, usize), SolveError>
where
    F: FnMut(&[f64], &mut [f64]) -> f64, // returns mass lost by the walk
{
    let dim = u.len();
    match method {
        Method::Power => {
            let mut x = u.to_vec();
            let mut y = vec![0.0; dim];
            let mut last_diff = f64::INFINITY;
            for iteration in 1..=max_iter {
                let lost = walk(&x, &mut y);
                for i in 0..dim {
                    y[i] = epsilon * (y[i] + lost * u[i]) + (1.0 - epsilon) * u[i];
                }
                last_diff = l1_diff(&x, &y);
                std::mem::swap(&mut x, &mut y);
                if last_diff < tol {
                    normalize(&mut x);
                    return Ok((x, last_diff, iteration));
                }
            }
            Err(SolveError::NotConverged {
                residual: last_diff,
                iterations: max_iter,
            })
        }
        Method::LinearSeries => {
            let mut term: Vec<f64> = u.iter().map(|&ui| (1.0 - epsilon) * ui).collect();
            let mut x = term.clone();
            let mut y = vec![0.0; dim];
            for iteration in 1..=max_iter {
                let lost = walk(&term, &mut y);
                for i in 0..dim {
                    term[i] = epsilon * (y[i] + lost * u[i]);
                    x[i] += term[i];
                }
                let term_norm: f64 = term.iter().sum(); // nonnegative terms
                if term_norm < tol {
                    normalize(&mut x);
                    return Ok((x, term_norm, iteration));
                }
            }
            Err(SolveError::NotConverged {
                residual: term.iter().sum(),
                iterations: max_iter,
            })
        }
    }
}

/// Standard PageRank: stationary distribution of
/// `eps * A D^-1 + (1 - eps) * v 1^T`.
pub fn standard_pagerank(g: &Graph, cfg: &PageRankConfig) -> Result<PageRankVector, SolveError> {
    cfg.validate()?;
    check_degrees(g)?;
    let v = cfg.teleport.materialize(g.node_count());
    check_node_distribution(g, &v)?;

    let inv_degree: Vec<f64> = g.degrees().iter().map(|&d| 1.0 / d as f64).collect();
    let walk = |x: &[f64], y: &mut [f64]| {
        parallel::fill_indexed(y, |i| {
            g.neighbors(i).iter().map(|&j| x[j] * inv_degree[j]).sum()
        });
        0.0
    };
    let (values, residual, iterations) =
        solve_chain(&v, cfg.epsilon, cfg.method, cfg.tol, cfg.max_iter, walk)?;
    Ok(PageRankVector {
        values,
        space: Space::Node,
        residual,
        iterations,
    })
}

/// mu-PageRank via the lifted edge walk. mu = 0 is non-backtracking
/// PageRank, mu = 1 reproduces standard PageRank, and the infinity sentinel
/// delegates to the closed-form limit. Returns both the stationary edge
/// vector and its node projection.
pub fn mu_pagerank(g: &Graph, cfg: &PageRankConfig) -> Result<MuPageRank, SolveError> {
    cfg.validate()?;
    check_degrees(g)?;
    let v = cfg.teleport.materialize(g.node_count());
    check_node_distribution(g, &v)?;
    let lift = EdgeLift::from_graph(g)?;
    let u = lift.lift_distribution(&v, cfg.mode)?;

    let mu = match cfg.mu {
        Mu::Infinity => {
            // closed form: pi_hat = (I + eps * tau) u / (1 + eps)
            let scale = 1.0 / (1.0 + cfg.epsilon);
            let edge_values: Vec<f64> = (0..u.len())
                .map(|e| scale * (u[e] + cfg.epsilon * u[e ^ 1]))
                .collect();
            return Ok(finish_mu(&lift, edge_values, 0.0, 0));
        }
        Mu::Finite(mu) => mu,
    };

    let mut node_scratch = vec![0.0; g.node_count()];
    let walk = |x: &[f64], y: &mut [f64]| {
        lift.transition_into(mu, x, &mut node_scratch, y);
        if mu == 0.0 {
            lift.dangling_mass(x)
        } else {
            0.0
        }
    };
    let (edge_values, residual, iterations) =
        solve_chain(&u, cfg.epsilon, cfg.method, cfg.tol, cfg.max_iter, walk)?;
    Ok(finish_mu(&lift, edge_values, residual, iterations))
}

fn finish_mu(
    lift: &EdgeLift,
    mut edge_values: Vec<f64>,
    residual: f64,
    iterations: usize,
) -> MuPageRank {
    normalize(&mut edge_values);
    let mut node_values = lift.project_to_nodes(&edge_values);
    normalize(&mut node_values);
    MuPageRank {
        node: PageRankVector {
            values: node_values,
            space: Space::Node,
            residual,
            iterations,
        },
        edge: PageRankVector {
            values: edge_values,
            space: Space::Edge,
            residual,
            iterations,
        },
    }
}

/// The mu -> infinity limit of mu-PageRank, evaluated in closed form:
/// node i gets `v_i / (1 + eps) + eps / (1 + eps) * sum_{j ~ i} v_j / d_j`.
pub fn infinity_pagerank(g: &Graph, epsilon: f64, v: &[f64]) -> Result<PageRankVector, SolveError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SolveError::BadEpsilon(epsilon));
    }
    check_degrees(g)?;
    check_node_distribution(g, v)?;
    let scale = 1.0 / (1.0 + epsilon);
    let mut values = vec![0.0; g.node_count()];
    parallel::fill_indexed(&mut values, |i| {
        let neighbor_sum: f64 = g
            .neighbors(i)
            .iter()
            .map(|&j| v[j] / g.degree(j) as f64)
            .sum();
        scale * (v[i] + epsilon * neighbor_sum)
    });
    normalize(&mut values);
    Ok(PageRankVector {
        values,
        space: Space::Node,
        residual: 0.0,
        iterations: 0,
    })
}

/// Exact PageRank of a connected bipartite biregular graph with uniform
/// teleportation: part-1 nodes get `(1 + eps d1/d2) / (n (1 + eps))` and
/// part-2 nodes `(1 + eps d2/d1) / (n (1 + eps))`.
pub fn biregular_closed_form(
    n1: usize,
    n2: usize,
    d1: usize,
    d2: usize,
    epsilon: f64,
) -> Result<Vec<f64>, SolveError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SolveError::BadEpsilon(epsilon));
    }
    if n1 == 0 || n2 == 0 || d1 == 0 || d2 == 0 {
        return Err(SolveError::DegenerateBiregular);
    }
    if n1 * d1 != n2 * d2 {
        return Err(SolveError::InfeasibleBiregular {
            left: n1 * d1,
            right: n2 * d2,
        });
    }
    let n = (n1 + n2) as f64;
    let base = 1.0 / (n * (1.0 + epsilon));
    let part1 = base * (1.0 + epsilon * d1 as f64 / d2 as f64);
    let part2 = base * (1.0 + epsilon * d2 as f64 / d1 as f64);
    let mut values = vec![part1; n1];
    values.extend(std::iter::repeat_n(part2, n2));
    Ok(values)
}
