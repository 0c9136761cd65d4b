//! Empirical studies: mu sweeps with monotonicity verdicts, top-k overlap
//! between rankings, overlap trials over random-graph models, and a Monte
//! Carlo simulation of the lifted walk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::generate::{derive_stream_seed, generate, GenerateError, GeneratorSpec};
use crate::graph::Graph;
use crate::lift::{EdgeLift, LiftError, LiftMode};
use crate::parallel;
use crate::solver::{
    infinity_pagerank, mu_pagerank, standard_pagerank, Mu, PageRankConfig, SolveError,
};

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("mu grid must be strictly increasing and nonnegative")]
    BadGrid,
    #[error("percent levels must lie in (0, 100]")]
    BadPercent,
    #[error("walk needs at least one step")]
    NoSteps,
    #[error("every node needs degree >= 1 for the edge walk, node {0} is isolated")]
    IsolatedNode(usize),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// Default tolerance when deciding whether consecutive differences count as
/// a sign change (machine-error allowance).
pub const DEFAULT_TOL_MONO: f64 = 1e-9;

/// `count` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// The 20-point [0, 100] grid used by the reference sweep.
pub fn default_mu_grid() -> Vec<f64> {
    linspace(0.0, 100.0, 20)
}

/// Per-node behaviour of `pi_mu` along a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Increasing,
    Decreasing,
    /// All consecutive differences within tolerance.
    Constant,
    NonMonotone,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub mu_grid: Vec<f64>,
    /// Row per grid point; `None` marks a solver failure at that point.
    pub values: Vec<Option<Vec<f64>>>,
    pub verdicts: Vec<Verdict>,
    /// max - min of each successful row.
    pub range_widths: Vec<Option<f64>>,
    /// Grid indices where the solver failed, with the error text.
    pub failures: Vec<(usize, String)>,
}

impl SweepResult {
    /// Whether the range width shrinks (within tol) along the grid; the
    /// conjectured behaviour, reported rather than asserted.
    pub fn range_shrinks(&self, tol: f64) -> bool {
        let widths: Vec<f64> = self.range_widths.iter().filter_map(|w| *w).collect();
        widths.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

/// Computes `pi_mu` across the grid and classifies every node's trajectory
/// by sign-checking consecutive differences with tolerance `tol_mono`.
pub fn mu_sweep(
    g: &Graph,
    epsilon: f64,
    grid: &[f64],
    tol_mono: f64,
) -> Result<SweepResult, ExperimentError> {
    if grid.is_empty()
        || grid[0] < 0.0
        || grid.iter().any(|m| !m.is_finite())
        || grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(ExperimentError::BadGrid);
    }
    let rows = parallel::map_indexed(grid.len(), |i| {
        let mut cfg = PageRankConfig::new(epsilon);
        cfg.mu = Mu::Finite(grid[i]);
        mu_pagerank(g, &cfg).map(|out| out.node.values)
    });
    let mut values = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        match row {
            Ok(v) => values.push(Some(v)),
            Err(e) => {
                failures.push((i, e.to_string()));
                values.push(None);
            }
        }
    }
    let range_widths = values
        .iter()
        .map(|row| {
            row.as_ref().map(|v| {
                let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let min = v.iter().copied().fold(f64::INFINITY, f64::min);
                max - min
            })
        })
        .collect();
    let verdicts = classify(g.node_count(), &values, tol_mono);
    Ok(SweepResult {
        mu_grid: grid.to_vec(),
        values,
        verdicts,
        range_widths,
        failures,
    })
}

fn classify(n: usize, values: &[Option<Vec<f64>>], tol: f64) -> Vec<Verdict> {
    let rows: Vec<&Vec<f64>> = values.iter().filter_map(|r| r.as_ref()).collect();
    (0..n)
        .map(|node| {
            let mut rising = false;
            let mut falling = false;
            for pair in rows.windows(2) {
                let diff = pair[1][node] - pair[0][node];
                if diff > tol {
                    rising = true;
                } else if diff < -tol {
                    falling = true;
                }
            }
            match (rising, falling) {
                (true, true) => Verdict::NonMonotone,
                (true, false) => Verdict::Increasing,
                (false, true) => Verdict::Decreasing,
                (false, false) => Verdict::Constant,
            }
        })
        .collect()
}

/// Fraction of shared indices among the top `ceil(percent * n / 100)` of
/// both vectors, ranking by value descending with ties broken by lower
/// index.
pub fn topk_overlap(a: &[f64], b: &[f64], percent: f64) -> Result<f64, ExperimentError> {
    if a.len() != b.len() {
        return Err(ExperimentError::Lift(LiftError::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        }));
    }
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(ExperimentError::BadPercent);
    }
    let n = a.len();
    let k = ((percent * n as f64) / 100.0).ceil() as usize;
    let top = |v: &[f64]| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| v[j].total_cmp(&v[i]).then(i.cmp(&j)));
        idx.truncate(k);
        idx.sort_unstable();
        idx
    };
    let ta = top(a);
    let tb = top(b);
    let mut shared = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < ta.len() && j < tb.len() {
        match ta[i].cmp(&tb[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(shared as f64 / k as f64)
}

/// Outcome of repeated standard-vs-infinity ranking comparisons on a
/// random-graph model.
#[derive(Debug, Clone)]
pub struct OverlapReport {
    pub spec: GeneratorSpec,
    pub trials: usize,
    pub percents: Vec<f64>,
    /// Mean overlap per percent level across successful trials.
    pub mean_overlap: Vec<f64>,
    /// Per-trial overlap rows; `None` for skipped trials.
    pub per_trial: Vec<Option<Vec<f64>>>,
    /// Trial index and reason for every skipped trial.
    pub skipped: Vec<(usize, String)>,
    /// Mean node degree across successful trials (after dropping isolated
    /// nodes), handy for matching models.
    pub mean_degree: f64,
}

/// Runs `trials` independent draws of the model, computes standard and
/// infinity PageRank with uniform teleportation on each, and records the
/// top-percent overlaps. Isolated nodes (possible under gnp and pareto-cl)
/// are dropped before ranking; trials whose graph degenerates are skipped
/// and recorded. Trial t draws its seed from (spec seed, t), so results do
/// not depend on scheduling.
pub fn overlap_experiment(
    spec: &GeneratorSpec,
    trials: usize,
    percents: &[f64],
    epsilon: f64,
) -> Result<OverlapReport, ExperimentError> {
    if percents.iter().any(|&p| !(p > 0.0 && p <= 100.0)) {
        return Err(ExperimentError::BadPercent);
    }
    let results = parallel::map_indexed(trials, |t| {
        run_overlap_trial(spec, t as u64, percents, epsilon)
    });
    let mut per_trial = Vec::with_capacity(trials);
    let mut skipped = Vec::new();
    let mut degree_sum = 0.0;
    let mut ok = 0usize;
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Ok((overlaps, mean_degree)) => {
                per_trial.push(Some(overlaps));
                degree_sum += mean_degree;
                ok += 1;
            }
            Err(reason) => {
                skipped.push((t, reason));
                per_trial.push(None);
            }
        }
    }
    let mut mean_overlap = vec![0.0; percents.len()];
    if ok > 0 {
        for row in per_trial.iter().flatten() {
            for (acc, &x) in mean_overlap.iter_mut().zip(row) {
                *acc += x;
            }
        }
        for acc in &mut mean_overlap {
            *acc /= ok as f64;
        }
    }
    Ok(OverlapReport {
        spec: spec.clone(),
        trials,
        percents: percents.to_vec(),
        mean_overlap,
        per_trial,
        skipped,
        mean_degree: if ok > 0 { degree_sum / ok as f64 } else { 0.0 },
    })
}

fn run_overlap_trial(
    spec: &GeneratorSpec,
    trial: u64,
    percents: &[f64],
    epsilon: f64,
) -> Result<(Vec<f64>, f64), String> {
    let drawn = generate(&spec.with_seed(derive_stream_seed(spec.seed(), trial)))
        .map_err(|e: GenerateError| e.to_string())?;
    let (g, _kept) = drawn
        .graph
        .without_isolated()
        .ok_or_else(|| "graph has no edges".to_string())?;
    if g.node_count() < 2 {
        return Err("fewer than two non-isolated nodes".to_string());
    }
    let standard =
        standard_pagerank(&g, &PageRankConfig::new(epsilon)).map_err(|e| e.to_string())?;
    let uniform = vec![1.0 / g.node_count() as f64; g.node_count()];
    let limit = infinity_pagerank(&g, epsilon, &uniform).map_err(|e| e.to_string())?;
    let overlaps = percents
        .iter()
        .map(|&p| topk_overlap(&standard.values, &limit.values, p).map_err(|e| e.to_string()))
        .collect::<Result<Vec<f64>, String>>()?;
    let mean_degree = 2.0 * g.edge_count() as f64 / g.node_count() as f64;
    Ok((overlaps, mean_degree))
}

/// Simulates the lifted walk: from the current directed edge, teleport with
/// probability 1 - eps to an edge drawn from the lifted uniform
/// distribution, otherwise step with the mu-weighted transition (dangling
/// edges at mu = 0 teleport as well). Visits are counted on tail nodes and
/// normalized, matching the projection used by the solvers.
pub fn monte_carlo_walk(
    g: &Graph,
    epsilon: f64,
    mu: f64,
    steps: usize,
    seed: u64,
) -> Result<Vec<f64>, ExperimentError> {
    if steps == 0 {
        return Err(ExperimentError::NoSteps);
    }
    if mu < 0.0 || mu.is_nan() {
        return Err(ExperimentError::Lift(LiftError::NegativeMu(mu)));
    }
    if let Some(v) = (0..g.node_count()).find(|&v| g.degree(v) == 0) {
        return Err(ExperimentError::IsolatedNode(v));
    }
    let lift = EdgeLift::from_graph(g)?;
    let uniform = vec![1.0 / g.node_count() as f64; g.node_count()];
    let u = lift.lift_distribution(&uniform, LiftMode::TailDegree)?;
    // cumulative distribution for O(log 2m) teleport draws
    let mut cumulative = Vec::with_capacity(u.len());
    let mut acc = 0.0;
    for &ue in &u {
        acc += ue;
        cumulative.push(acc);
    }
    let draw_teleport = |r: f64| -> usize {
        cumulative
            .partition_point(|&c| c < r)
            .min(cumulative.len() - 1)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; g.node_count()];
    let mut edge = draw_teleport(rng.random::<f64>());
    for _ in 0..steps {
        counts[lift.tail(edge)] += 1;
        let d = lift.head_degree(edge);
        if rng.random::<f64>() >= epsilon || (mu == 0.0 && d == 1) {
            edge = draw_teleport(rng.random::<f64>());
            continue;
        }
        let back = lift.reverse(edge);
        let p_back = mu / (d as f64 - 1.0 + mu);
        edge = if rng.random::<f64>() < p_back {
            back
        } else {
            // uniform over the other d - 1 edges leaving head(edge)
            let out = lift.out_edges(lift.head(edge));
            let pick = out[rng.random_range(0..d - 1)];
            if pick == back {
                out[d - 1]
            } else {
                pick
            }
        };
    }
    let total = steps as f64;
    Ok(counts.iter().map(|&c| c as f64 / total).collect())
}
