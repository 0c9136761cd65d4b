#![allow(dead_code)] // each test binary uses a subset of these helpers
#![allow(clippy::needless_range_loop)] // index loops mirror the matrix notation

//! Shared test oracles: dense assemblies of the lift operators built
//! directly from their entrywise definitions, plus random-graph helpers.
//!
//! The dense matrices are assembled from the edge enumeration alone
//! (head/tail indicator rules), never from the production operators, so
//! the algebraic identities they satisfy act as an independent check.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use murank::generate::{generate, GeneratorSpec};
use murank::graph::Graph;
use murank::lift::EdgeLift;

pub struct DenseLift {
    /// 2m x n head indicator: S[e][x] = 1 iff head(e) = x.
    pub s: Vec<Vec<i64>>,
    /// n x 2m tail indicator: T[x][e] = 1 iff tail(e) = x.
    pub t: Vec<Vec<i64>>,
    /// 2m x 2m reversal pairing.
    pub tau: Vec<Vec<i64>>,
    /// 2m x 2m edge adjacency: C[e][f] = 1 iff head(e) = tail(f).
    pub c: Vec<Vec<i64>>,
    /// Non-backtracking matrix: B[e][f] = 1 iff head(e) = tail(f) and
    /// tail(e) != head(f).
    pub b: Vec<Vec<i64>>,
}

pub fn assemble(lift: &EdgeLift) -> DenseLift {
    let n = lift.node_count();
    let two_m = lift.edge_count();
    let mut s = vec![vec![0i64; n]; two_m];
    let mut t = vec![vec![0i64; two_m]; n];
    for e in 0..two_m {
        s[e][lift.head(e)] = 1;
        t[lift.tail(e)][e] = 1;
    }
    let mut tau = vec![vec![0i64; two_m]; two_m];
    let mut c = vec![vec![0i64; two_m]; two_m];
    let mut b = vec![vec![0i64; two_m]; two_m];
    for e in 0..two_m {
        for f in 0..two_m {
            let follows = lift.head(e) == lift.tail(f);
            let returns = follows && lift.tail(e) == lift.head(f);
            tau[e][f] = returns as i64;
            c[e][f] = follows as i64;
            b[e][f] = (follows && !returns) as i64;
        }
    }
    DenseLift { s, t, tau, c, b }
}

pub fn adjacency(g: &Graph) -> Vec<Vec<i64>> {
    let n = g.node_count();
    let mut a = vec![vec![0i64; n]; n];
    for &(u, v) in g.edges() {
        a[u][v] = 1;
        a[v][u] = 1;
    }
    a
}

pub fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![0i64; cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k] != 0 {
                for j in 0..cols {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    out
}

pub fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = a.len();
    let cols = a[0].len();
    let mut out = vec![vec![0i64; rows]; cols];
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            out[j][i] = x;
        }
    }
    out
}

/// Column e of the walk operator, probed through `apply_transition` with a
/// basis vector. Entry [f][e] is the probability of stepping e -> f.
pub fn probe_transition(lift: &EdgeLift, mu: f64) -> Vec<Vec<f64>> {
    let two_m = lift.edge_count();
    let mut matrix = vec![vec![0.0; two_m]; two_m];
    for e in 0..two_m {
        let mut basis = vec![0.0; two_m];
        basis[e] = 1.0;
        let column = lift.apply_transition(mu, &basis).unwrap();
        for (f, &value) in column.iter().enumerate() {
            matrix[f][e] = value;
        }
    }
    matrix
}

/// The same operator assembled the dense way: `C_mu^T (Dhat - (1-mu) I)^-1`
/// with `C_mu = C - (1-mu) tau` and `Dhat[e] = d_head(e)`.
pub fn dense_transition(lift: &EdgeLift, dense: &DenseLift, mu: f64) -> Vec<Vec<f64>> {
    let two_m = lift.edge_count();
    let mut out = vec![vec![0.0; two_m]; two_m];
    for e in 0..two_m {
        let denom = lift.head_degree(e) as f64 - 1.0 + mu;
        if denom == 0.0 {
            continue; // dangling column at mu = 0
        }
        for f in 0..two_m {
            let c_mu = dense.c[e][f] as f64 - (1.0 - mu) * dense.tau[e][f] as f64;
            out[f][e] = c_mu / denom;
        }
    }
    out
}

/// Lifted uniform teleportation: u[e] = (1/n) / d_tail(e).
pub fn uniform_lifted(g: &Graph, lift: &EdgeLift) -> Vec<f64> {
    let n = g.node_count() as f64;
    (0..lift.edge_count())
        .map(|e| (1.0 / n) / g.degree(lift.tail(e)) as f64)
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Connected G(n, p) with n in 2..=max_n, retrying seeds until connected.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, max_n: usize) -> Graph {
    loop {
        let n = rng.random_range(2..=max_n);
        let p = (1.5 * (n as f64).ln().max(1.0) / n as f64).min(1.0);
        let out = generate(&GeneratorSpec::Gnp {
            n,
            p,
            seed: rng.random(),
        })
        .unwrap();
        if out.graph.edge_count() >= 1 && out.graph.is_connected() {
            return out.graph;
        }
    }
}

/// Connected k-regular graph with n <= max_n (n adjusted so n*k is even).
pub fn random_connected_regular(rng: &mut ChaCha8Rng, k: usize, max_n: usize) -> Graph {
    loop {
        let mut n = rng.random_range(k + 2..=max_n);
        if n * k % 2 == 1 {
            n += 1;
        }
        let out = generate(&GeneratorSpec::Regular {
            n,
            degree: k,
            seed: rng.random(),
        })
        .unwrap();
        if out.graph.is_connected() {
            return out.graph;
        }
    }
}

/// Connected bipartite biregular graph with both degrees >= 2 and
/// n1 + n2 <= max_n. Returns (graph, n1, n2, d1, d2).
pub fn random_connected_biregular(
    rng: &mut ChaCha8Rng,
    max_n: usize,
) -> (Graph, usize, usize, usize, usize) {
    loop {
        let d1 = rng.random_range(2..=4);
        let d2 = rng.random_range(2..=4);
        let max_scale = max_n / (d1 + d2);
        if max_scale < 1 {
            continue;
        }
        let scale = rng.random_range(1..=max_scale);
        let (n1, n2) = (d2 * scale, d1 * scale);
        if d1 > n2 || d2 > n1 {
            continue;
        }
        let out = generate(&GeneratorSpec::Biregular {
            n1,
            n2,
            d1,
            d2,
            seed: rng.random(),
        })
        .unwrap();
        if out.graph.is_connected() {
            return (out.graph, n1, n2, d1, d2);
        }
    }
}

/// Random graph with minimum degree >= 2, n <= max_n.
pub fn random_min_degree_two(rng: &mut ChaCha8Rng, max_n: usize) -> Graph {
    loop {
        let n = rng.random_range(5..=max_n);
        let p = (2.5 * (n as f64).ln() / n as f64).min(1.0);
        let out = generate(&GeneratorSpec::Gnp {
            n,
            p,
            seed: rng.random(),
        })
        .unwrap();
        if out.graph.min_degree() >= 2 {
            return out.graph;
        }
    }
}
