//! Random-graph generators used by the experiments and benchmarks.
//!
//! All models are pure functions of their spec (including the seed): the
//! same spec always yields a bit-identical edge set.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Pareto};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("stochastic block model requires nonempty blocks")]
    EmptyBlock,
    #[error("infeasible degree sequence: {0}")]
    Infeasible(String),
    #[error("gave up after {0} rejection-sampling attempts")]
    RetriesExhausted(usize),
    #[error("pareto weights require shape > 0 and min weight > 0")]
    BadPareto,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A random-graph model together with its parameters and seed.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// Stochastic block model: edge probability `p_in` inside a block,
    /// `p_out` across blocks.
    Sbm {
        sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
        seed: u64,
    },
    /// Random k-regular graph via the pairing model with rejection.
    Regular { n: usize, degree: usize, seed: u64 },
    /// Random bipartite biregular graph via stub matching with rejection.
    Biregular {
        n1: usize,
        n2: usize,
        d1: usize,
        d2: usize,
        seed: u64,
    },
    /// Erdos-Renyi G(n, p).
    Gnp { n: usize, p: f64, seed: u64 },
    /// Chung-Lu graph with Pareto-distributed expected degrees; stands in
    /// for a hyper-soft configuration model. Edge probability is
    /// `min(1, w_u * w_v / sum(w))`.
    ParetoCl {
        n: usize,
        shape: f64,
        min_weight: f64,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn seed(&self) -> u64 {
        match self {
            GeneratorSpec::Sbm { seed, .. }
            | GeneratorSpec::Regular { seed, .. }
            | GeneratorSpec::Biregular { seed, .. }
            | GeneratorSpec::Gnp { seed, .. }
            | GeneratorSpec::ParetoCl { seed, .. } => *seed,
        }
    }

    pub fn with_seed(&self, new_seed: u64) -> GeneratorSpec {
        let mut spec = self.clone();
        match &mut spec {
            GeneratorSpec::Sbm { seed, .. }
            | GeneratorSpec::Regular { seed, .. }
            | GeneratorSpec::Biregular { seed, .. }
            | GeneratorSpec::Gnp { seed, .. }
            | GeneratorSpec::ParetoCl { seed, .. } => *seed = new_seed,
        }
        spec
    }
}

/// A generated graph plus ground-truth block labels when the model has them.
#[derive(Debug, Clone)]
pub struct GeneratedGraph {
    pub graph: Graph,
    pub truth: Option<Vec<usize>>,
}

const MAX_PAIRING_ATTEMPTS: usize = 10_000;

/// Draws a graph from the model. Reproducible: the spec's seed fully
/// determines the output.
pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedGraph, GenerateError> {
    match spec {
        GeneratorSpec::Sbm {
            sizes,
            p_in,
            p_out,
            seed,
        } => sbm(sizes, *p_in, *p_out, *seed),
        GeneratorSpec::Regular { n, degree, seed } => regular(*n, *degree, *seed),
        GeneratorSpec::Biregular {
            n1,
            n2,
            d1,
            d2,
            seed,
        } => biregular(*n1, *n2, *d1, *d2, *seed),
        GeneratorSpec::Gnp { n, p, seed } => gnp(*n, *p, *seed),
        GeneratorSpec::ParetoCl {
            n,
            shape,
            min_weight,
            seed,
        } => pareto_cl(*n, *shape, *min_weight, *seed),
    }
}

/// Deterministically derives an independent seed for a sub-stream such as a
/// trial or restart index (SplitMix64 finalizer).
pub fn derive_stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_probability(p: f64) -> Result<(), GenerateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::BadProbability(p));
    }
    Ok(())
}

fn sbm(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> Result<GeneratedGraph, GenerateError> {
    check_probability(p_in)?;
    check_probability(p_out)?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(GenerateError::EmptyBlock);
    }
    let n: usize = sizes.iter().sum();
    let mut labels = Vec::with_capacity(n);
    for (block, &size) in sizes.iter().enumerate() {
        labels.extend(std::iter::repeat_n(block, size));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    Ok(GeneratedGraph {
        graph: Graph::from_edges(n, &pairs)?,
        truth: Some(labels),
    })
}

fn gnp(n: usize, p: f64, seed: u64) -> Result<GeneratedGraph, GenerateError> {
    check_probability(p)?;
    if n == 0 {
        return Err(GenerateError::Graph(GraphError::Empty));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    Ok(GeneratedGraph {
        graph: Graph::from_edges(n, &pairs)?,
        truth: None,
    })
}

fn regular(n: usize, degree: usize, seed: u64) -> Result<GeneratedGraph, GenerateError> {
    if n == 0 {
        return Err(GenerateError::Graph(GraphError::Empty));
    }
    if degree >= n {
        return Err(GenerateError::Infeasible(format!(
            "degree {degree} requires more than {n} nodes"
        )));
    }
    if !(n * degree).is_multiple_of(2) {
        return Err(GenerateError::Infeasible(format!(
            "n*k = {} is odd",
            n * degree
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n)
        .flat_map(|v| std::iter::repeat_n(v, degree))
        .collect();
    for _ in 0..MAX_PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        if let Some(pairs) = simple_pairing(&stubs) {
            return Ok(GeneratedGraph {
                graph: Graph::from_edges(n, &pairs)?,
                truth: None,
            });
        }
    }
    Err(GenerateError::RetriesExhausted(MAX_PAIRING_ATTEMPTS))
}

fn biregular(
    n1: usize,
    n2: usize,
    d1: usize,
    d2: usize,
    seed: u64,
) -> Result<GeneratedGraph, GenerateError> {
    if n1 == 0 || n2 == 0 {
        return Err(GenerateError::Graph(GraphError::Empty));
    }
    if n1 * d1 != n2 * d2 {
        return Err(GenerateError::Infeasible(format!(
            "n1*d1 = {} but n2*d2 = {}",
            n1 * d1,
            n2 * d2
        )));
    }
    if d1 > n2 || d2 > n1 {
        return Err(GenerateError::Infeasible(format!(
            "d1 = {d1} exceeds n2 = {n2} or d2 = {d2} exceeds n1 = {n1}"
        )));
    }
    let n = n1 + n2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left: Vec<usize> = (0..n1).flat_map(|v| std::iter::repeat_n(v, d1)).collect();
    let mut right: Vec<usize> = (n1..n).flat_map(|v| std::iter::repeat_n(v, d2)).collect();
    for _ in 0..MAX_PAIRING_ATTEMPTS {
        right.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(left.len());
        if left.iter().zip(&right).all(|(&u, &v)| seen.insert((u, v))) {
            let pairs: Vec<(usize, usize)> =
                left.iter().copied().zip(right.iter().copied()).collect();
            return Ok(GeneratedGraph {
                graph: Graph::from_edges(n, &pairs)?,
                truth: None,
            });
        }
    }
    Err(GenerateError::RetriesExhausted(MAX_PAIRING_ATTEMPTS))
}

fn pareto_cl(
    n: usize,
    shape: f64,
    min_weight: f64,
    seed: u64,
) -> Result<GeneratedGraph, GenerateError> {
    if n == 0 {
        return Err(GenerateError::Graph(GraphError::Empty));
    }
    if shape.is_nan() || shape <= 0.0 || min_weight.is_nan() || min_weight <= 0.0 {
        return Err(GenerateError::BadPareto);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pareto = Pareto::new(min_weight, shape).map_err(|_| GenerateError::BadPareto)?;
    let weights: Vec<f64> = (0..n).map(|_| pareto.sample(&mut rng)).collect();
    let total: f64 = weights.iter().sum();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = (weights[u] * weights[v] / total).min(1.0);
            if rng.random::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    Ok(GeneratedGraph {
        graph: Graph::from_edges(n, &pairs)?,
        truth: None,
    })
}

/// Pairs consecutive stubs, rejecting shuffles that create loops or
/// duplicate edges.
fn simple_pairing(stubs: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut seen = HashSet::with_capacity(stubs.len() / 2);
    let mut pairs = Vec::with_capacity(stubs.len() / 2);
    for chunk in stubs.chunks_exact(2) {
        let (u, v) = (chunk[0], chunk[1]);
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            return None;
        }
        pairs.push((u, v));
    }
    Some(pairs)
}
