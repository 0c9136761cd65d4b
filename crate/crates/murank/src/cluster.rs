//! Clustering with personalized infinity-PageRank vectors.
//!
//! Every node gets the closed-form infinity-PageRank vector seeded at
//! itself; k centers are drawn at random and nodes are repeatedly
//! reassigned to the center minimizing the degree-scaled PageRank distance
//! `|| (rho_n - center) D^{-1/2} ||`, with centers replaced by the mean of
//! their members until the center movement (Frobenius norm) drops below
//! tolerance.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::generate::derive_stream_seed;
use crate::graph::Graph;
use crate::parallel;
use crate::solver::SolveError;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("cluster count {k} must lie in 1..={n}")]
    BadClusterCount { k: usize, n: usize },
    #[error("label vectors have different lengths: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("label vectors must be nonempty")]
    EmptyLabels,
    #[error("matching supports at most {max} distinct labels, got {got}")]
    TooManyClusters { max: usize, got: usize },
    #[error("node {0} has degree 0")]
    ZeroDegree(usize),
    #[error("need at least one restart")]
    NoRestarts,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Row n is the infinity-PageRank vector personalized at node n
/// (`v = e_n`); its support is the closed neighborhood of n.
#[derive(Debug, Clone)]
pub struct PersonalizedBasis {
    rows: Vec<Vec<f64>>,
    degrees: Vec<usize>,
}

impl PersonalizedBasis {
    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }
}

/// Builds all n personalized rows in O(n + m) each: the seed node keeps
/// `1 / (1 + eps)` and every neighbor j of the seed receives
/// `eps / ((1 + eps) d_seed)`.
pub fn personalized_basis(g: &Graph, epsilon: f64) -> Result<PersonalizedBasis, ClusterError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ClusterError::Solve(SolveError::BadEpsilon(epsilon)));
    }
    if let Some(v) = (0..g.node_count()).find(|&v| g.degree(v) == 0) {
        return Err(ClusterError::Solve(SolveError::IsolatedNode(v)));
    }
    let n = g.node_count();
    let scale = 1.0 / (1.0 + epsilon);
    let rows = parallel::map_indexed(n, |seed| {
        let mut row = vec![0.0; n];
        row[seed] = scale;
        let share = epsilon * scale / g.degree(seed) as f64;
        for &j in g.neighbors(seed) {
            row[j] = share;
        }
        row
    });
    Ok(PersonalizedBasis {
        rows,
        degrees: g.degrees().to_vec(),
    })
}

/// Euclidean distance between two vectors after scaling coordinate x by
/// `1 / sqrt(d_x)`.
pub fn pr_distance(a: &[f64], b: &[f64], degrees: &[usize]) -> Result<f64, ClusterError> {
    if a.len() != b.len() || a.len() != degrees.len() {
        return Err(ClusterError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if let Some(x) = degrees.iter().position(|&d| d == 0) {
        return Err(ClusterError::ZeroDegree(x));
    }
    Ok(scaled_distance(a, b, degrees))
}

fn scaled_distance(a: &[f64], b: &[f64], degrees: &[usize]) -> f64 {
    a.iter()
        .zip(b)
        .zip(degrees)
        .map(|((x, y), &d)| (x - y) * (x - y) / d as f64)
        .sum::<f64>()
        .sqrt()
}

/// A center was reseeded because its cluster emptied out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReseedEvent {
    pub iteration: usize,
    pub cluster: usize,
    pub node: usize,
}

#[derive(Debug, Clone)]
pub struct ClusterModel {
    pub k: usize,
    /// k x n center matrix; after convergence each row is the mean of its
    /// members' personalized rows.
    pub centers: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub iterations: usize,
    /// Frobenius distance between the last two center matrices.
    pub final_error: f64,
    pub seed: u64,
    /// Sum of member-to-center distances; restarts keep the smallest.
    pub objective: f64,
    pub reseeds: Vec<ReseedEvent>,
}

/// One clustering run: computes the basis, seeds k centers from `seed`, and
/// iterates assignment/update until the center movement is below `tol` or
/// `max_iter` is hit.
pub fn cluster(
    g: &Graph,
    k: usize,
    epsilon: f64,
    tol: f64,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterModel, ClusterError> {
    let basis = personalized_basis(g, epsilon)?;
    cluster_with_basis(&basis, k, tol, seed, max_iter)
}

/// Clustering on a precomputed basis (restarts share it).
pub fn cluster_with_basis(
    basis: &PersonalizedBasis,
    k: usize,
    tol: f64,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterModel, ClusterError> {
    let n = basis.node_count();
    if k == 0 || k > n {
        return Err(ClusterError::BadClusterCount { k, n });
    }
    let degrees = basis.degrees();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, n, k);
    let mut centers: Vec<Vec<f64>> = picked.iter().map(|i| basis.row(i).to_vec()).collect();

    let assign = |centers: &[Vec<f64>]| -> Vec<usize> {
        parallel::map_indexed(n, |node| {
            let row = basis.row(node);
            let mut best = 0usize;
            let mut best_dist = f64::INFINITY;
            for (i, center) in centers.iter().enumerate() {
                let dist = scaled_distance(row, center, degrees);
                if dist < best_dist {
                    best_dist = dist;
                    best = i;
                }
            }
            best
        })
    };

    let mut labels = vec![0usize; n];
    let mut iterations = 0usize;
    let mut final_error = f64::INFINITY;
    let mut reseeds = Vec::new();
    while iterations < max_iter {
        labels = assign(&centers);
        repair_empty_clusters(basis, &mut centers, &mut labels, iterations, &mut reseeds);

        // new centers: mean of the member rows (unscaled; the degree
        // scaling applies only inside distances)
        let mut sums = vec![vec![0.0; n]; k];
        let mut counts = vec![0usize; k];
        for (node, &label) in labels.iter().enumerate() {
            counts[label] += 1;
            let row = basis.row(node);
            let acc = &mut sums[label];
            for (slot, &x) in acc.iter_mut().zip(row) {
                *slot += x;
            }
        }
        for (acc, &count) in sums.iter_mut().zip(&counts) {
            for slot in acc.iter_mut() {
                *slot /= count as f64;
            }
        }

        final_error = centers
            .iter()
            .zip(&sums)
            .flat_map(|(old, new)| old.iter().zip(new).map(|(a, b)| (a - b) * (a - b)))
            .sum::<f64>()
            .sqrt();
        centers = sums;
        iterations += 1;
        if final_error < tol {
            break;
        }
    }
    // refresh labels against the final centers; at convergence this is the
    // fixed point of the assignment step
    labels = assign(&centers);

    let objective = labels
        .iter()
        .enumerate()
        .map(|(node, &label)| scaled_distance(basis.row(node), &centers[label], degrees))
        .sum();
    Ok(ClusterModel {
        k,
        centers,
        labels,
        iterations,
        final_error,
        seed,
        objective,
        reseeds,
    })
}

fn repair_empty_clusters(
    basis: &PersonalizedBasis,
    centers: &mut [Vec<f64>],
    labels: &mut [usize],
    iteration: usize,
    reseeds: &mut Vec<ReseedEvent>,
) {
    let k = centers.len();
    let degrees = basis.degrees();
    // every repair fills one empty cluster; it can empty a singleton, so
    // bound the passes
    for _ in 0..k {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        // steal the node farthest from its currently assigned center
        let (node, _) = labels
            .iter()
            .enumerate()
            .map(|(node, &l)| (node, scaled_distance(basis.row(node), &centers[l], degrees)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("nonempty labels");
        centers[empty] = basis.row(node).to_vec();
        labels[node] = empty;
        reseeds.push(ReseedEvent {
            iteration,
            cluster: empty,
            node,
        });
    }
}

/// Best of `restarts` independent runs (smallest within-cluster distance
/// sum, ties to the lowest restart index). Restart r derives its seed from
/// (seed, r), so the winner does not depend on scheduling.
pub fn cluster_restarts(
    g: &Graph,
    k: usize,
    epsilon: f64,
    tol: f64,
    seed: u64,
    restarts: usize,
    max_iter: usize,
) -> Result<ClusterModel, ClusterError> {
    if restarts == 0 {
        return Err(ClusterError::NoRestarts);
    }
    let basis = personalized_basis(g, epsilon)?;
    let runs = parallel::map_indexed(restarts, |r| {
        cluster_with_basis(&basis, k, tol, derive_stream_seed(seed, r as u64), max_iter)
    });
    let mut best: Option<ClusterModel> = None;
    for run in runs {
        let model = run?;
        let better = match &best {
            None => true,
            Some(champion) => model.objective < champion.objective,
        };
        if better {
            best = Some(model);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Normalized mutual information of two labelings: the mutual information
/// of the contingency table divided by the arithmetic mean of the two label
/// entropies, clamped to [0, 1]. Invariant under relabeling; 0 when exactly
/// one side is constant, 1 when both are (identical trivial partitions).
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64, ClusterError> {
    if a.len() != b.len() {
        return Err(ClusterError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.is_empty() {
        return Err(ClusterError::EmptyLabels);
    }
    let n = a.len() as f64;
    // BTreeMaps keep the summation order deterministic
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut count_a: BTreeMap<usize, usize> = BTreeMap::new();
    let mut count_b: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *count_a.entry(x).or_default() += 1;
        *count_b.entry(y).or_default() += 1;
    }
    let entropy = |counts: &BTreeMap<usize, usize>| -> f64 {
        counts
            .values()
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_a = entropy(&count_a);
    let h_b = entropy(&count_b);
    if h_a == 0.0 && h_b == 0.0 {
        return Ok(1.0);
    }
    if h_a == 0.0 || h_b == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (&(x, y), &c) in &joint {
        let p_xy = c as f64 / n;
        let p_x = count_a[&x] as f64 / n;
        let p_y = count_b[&y] as f64 / n;
        mi += p_xy * (p_xy / (p_x * p_y)).ln();
    }
    Ok((mi / (0.5 * (h_a + h_b))).clamp(0.0, 1.0))
}

const MAX_MATCH_LABELS: usize = 20;

/// Maximum fraction of agreeing nodes over all injective mappings of
/// predicted labels onto true labels (optimal assignment on the
/// contingency table).
pub fn best_match_accuracy(labels: &[usize], truth: &[usize]) -> Result<f64, ClusterError> {
    if labels.len() != truth.len() {
        return Err(ClusterError::LengthMismatch {
            a: labels.len(),
            b: truth.len(),
        });
    }
    if labels.is_empty() {
        return Err(ClusterError::EmptyLabels);
    }
    let dense = |v: &[usize]| -> (Vec<usize>, usize) {
        let mut map = HashMap::new();
        let mut out = Vec::with_capacity(v.len());
        for &x in v {
            let next = map.len();
            out.push(*map.entry(x).or_insert(next));
        }
        (out, map.len())
    };
    let (pred, p) = dense(labels);
    let (gold, q) = dense(truth);
    if p.max(q) > MAX_MATCH_LABELS {
        return Err(ClusterError::TooManyClusters {
            max: MAX_MATCH_LABELS,
            got: p.max(q),
        });
    }
    let mut cost = vec![vec![0u32; q]; p];
    for (&i, &j) in pred.iter().zip(&gold) {
        cost[i][j] += 1;
    }
    // assignment by subset DP over true labels; skipping a predicted label
    // never beats matching it, so the optimum equals the injective one
    let mut dp = vec![0u32; 1 << q];
    for row in &cost {
        let mut next = dp.clone();
        for (mask, &base) in dp.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if mask & (1 << j) == 0 {
                    let to = mask | (1 << j);
                    next[to] = next[to].max(base + c);
                }
            }
        }
        dp = next;
    }
    let best = *dp.iter().max().expect("nonempty dp");
    Ok(best as f64 / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};

    fn k3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn basis_rows_k3() {
        let basis = personalized_basis(&k3(), 0.85).unwrap();
        let expected_self = 1.0 / 1.85;
        let expected_neighbor = 0.85 / (1.85 * 2.0);
        for n in 0..3 {
            let row = basis.row(n);
            assert!((row[n] - expected_self).abs() < 1e-12);
            for (j, &entry) in row.iter().enumerate() {
                if j != n {
                    assert!((entry - expected_neighbor).abs() < 1e-12);
                }
            }
            let total: f64 = row.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        assert!((basis.row(0)[0] - 0.540541).abs() < 1e-6);
        assert!((basis.row(0)[1] - 0.229730).abs() < 1e-6);
    }

    #[test]
    fn basis_row_p3_leaf() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let basis = personalized_basis(&p3, 0.85).unwrap();
        let row = basis.row(0);
        assert!((row[0] - 0.540540).abs() < 1e-6);
        assert!((row[1] - 0.459459).abs() < 1e-6);
        assert_eq!(row[2], 0.0);
    }

    #[test]
    fn basis_rows_match_solver() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]).unwrap();
        let basis = personalized_basis(&g, 0.85).unwrap();
        for n in 0..5 {
            let mut e_n = vec![0.0; 5];
            e_n[n] = 1.0;
            let direct = crate::solver::infinity_pagerank(&g, 0.85, &e_n).unwrap();
            for (a, b) in basis.row(n).iter().zip(&direct.values) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_depends_only_on_closed_neighborhood() {
        let g1 = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5), (2, 3)]).unwrap();
        let g2 = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5), (2, 3), (3, 5)]).unwrap();
        let b1 = personalized_basis(&g1, 0.85).unwrap();
        let b2 = personalized_basis(&g2, 0.85).unwrap();
        // the extra edge (3,5) is outside the closed neighborhood of 0 and 1
        for n in [0usize, 1] {
            assert_eq!(b1.row(n), b2.row(n));
        }
    }

    #[test]
    #[allow(clippy::approx_constant)] // 0.707107 is the frozen expected value
    fn distance_examples() {
        let degrees = vec![4usize; 4];
        let a = [1.0, 0.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0, 0.0];
        assert_eq!(pr_distance(&a, &a, &degrees).unwrap(), 0.0);
        let d_ab = pr_distance(&a, &b, &degrees).unwrap();
        let d_ba = pr_distance(&b, &a, &degrees).unwrap();
        assert_eq!(d_ab, d_ba);
        assert!((d_ab - 0.707107).abs() < 1e-6);
        assert!(matches!(
            pr_distance(&a, &b, &[1, 0, 1, 1]),
            Err(ClusterError::ZeroDegree(1))
        ));
    }

    #[test]
    fn separates_disjoint_triangles() {
        let out = generate(&GeneratorSpec::Sbm {
            sizes: vec![3, 3],
            p_in: 1.0,
            p_out: 0.0,
            seed: 2,
        })
        .unwrap();
        let truth = out.truth.unwrap();
        for seed in 0..10u64 {
            let model = cluster(&out.graph, 2, 0.85, 1e-9, seed, 200).unwrap();
            assert_eq!(best_match_accuracy(&model.labels, &truth).unwrap(), 1.0);
        }
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let model = cluster(&g, 4, 0.85, 1e-9, 5, 100).unwrap();
        assert_eq!(model.iterations, 1);
        assert_eq!(model.final_error, 0.0);
        let mut sorted = model.labels.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
    }

    #[test]
    fn empty_cluster_repair_steals_farthest_node() {
        let path: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 1)).collect();
        let g = Graph::from_edges(6, &path).unwrap();
        let basis = personalized_basis(&g, 0.85).unwrap();
        // both centers on node 0's row: cluster 1 never wins an assignment
        let mut centers = vec![basis.row(0).to_vec(), basis.row(0).to_vec()];
        let mut labels = vec![0usize; 6];
        let mut reseeds = Vec::new();
        repair_empty_clusters(&basis, &mut centers, &mut labels, 3, &mut reseeds);

        let farthest = (0..6)
            .max_by(|&a, &b| {
                pr_distance(basis.row(a), basis.row(0), g.degrees())
                    .unwrap()
                    .total_cmp(&pr_distance(basis.row(b), basis.row(0), g.degrees()).unwrap())
            })
            .unwrap();
        assert_eq!(
            reseeds,
            vec![ReseedEvent {
                iteration: 3,
                cluster: 1,
                node: farthest
            }]
        );
        assert_eq!(labels[farthest], 1);
        assert_eq!(centers[1], basis.row(farthest));
        assert!(labels.iter().filter(|&&l| l == 0).count() > 0);
    }

    #[test]
    fn rejects_bad_cluster_count() {
        let g = k3();
        assert!(matches!(
            cluster(&g, 4, 0.85, 1e-9, 0, 10),
            Err(ClusterError::BadClusterCount { k: 4, n: 3 })
        ));
        assert!(matches!(
            cluster(&g, 0, 0.85, 1e-9, 0, 10),
            Err(ClusterError::BadClusterCount { k: 0, n: 3 })
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let out = generate(&GeneratorSpec::Sbm {
            sizes: vec![10, 10],
            p_in: 0.9,
            p_out: 0.1,
            seed: 8,
        })
        .unwrap();
        let a = cluster(&out.graph, 2, 0.85, 1e-9, 13, 100).unwrap();
        let b = cluster(&out.graph, 2, 0.85, 1e-9, 13, 100).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.centers, b.centers);
        assert_eq!(a.iterations, b.iterations);
        let restarts_a = cluster_restarts(&out.graph, 2, 0.85, 1e-9, 13, 4, 100).unwrap();
        let restarts_b = cluster_restarts(&out.graph, 2, 0.85, 1e-9, 13, 4, 100).unwrap();
        assert_eq!(restarts_a.labels, restarts_b.labels);
        assert_eq!(restarts_a.seed, restarts_b.seed);
    }

    #[test]
    fn converged_assignment_is_a_fixed_point() {
        let out = generate(&GeneratorSpec::Sbm {
            sizes: vec![15, 15],
            p_in: 0.8,
            p_out: 0.05,
            seed: 4,
        })
        .unwrap();
        let basis = personalized_basis(&out.graph, 0.85).unwrap();
        let model = cluster_with_basis(&basis, 2, 1e-9, 1, 200).unwrap();
        assert!(model.final_error < 1e-9);
        // one more assignment pass changes nothing
        let degrees = basis.degrees();
        for (node, &label) in model.labels.iter().enumerate() {
            let row = basis.row(node);
            let best =
                (0..2)
                    .min_by(|&i, &j| {
                        scaled_distance(row, &model.centers[i], degrees)
                            .total_cmp(&scaled_distance(row, &model.centers[j], degrees))
                    })
                    .unwrap();
            assert_eq!(best, label);
        }
    }

    #[test]
    fn nmi_basics() {
        let a = vec![0, 0, 1, 1, 2, 2];
        assert!((nmi(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let constant = vec![7; 6];
        assert_eq!(nmi(&a, &constant).unwrap(), 0.0);
        assert_eq!(nmi(&constant, &constant).unwrap(), 1.0);
        // permuted cluster ids leave it unchanged
        let permuted: Vec<usize> = a.iter().map(|&x| (x + 1) % 3).collect();
        assert!((nmi(&a, &permuted).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            nmi(&a, &a[..3]),
            Err(ClusterError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn accuracy_examples() {
        let truth = vec![0, 0, 1, 1, 2, 2];
        assert_eq!(best_match_accuracy(&truth, &truth).unwrap(), 1.0);
        let permuted: Vec<usize> = truth.iter().map(|&x| (x + 2) % 3).collect();
        assert_eq!(best_match_accuracy(&permuted, &truth).unwrap(), 1.0);
        // 89 of 90 correct under the best mapping
        let gold: Vec<usize> = (0..90).map(|i| i / 30).collect();
        let mut pred = gold.clone();
        pred[0] = 2;
        let acc = best_match_accuracy(&pred, &gold).unwrap();
        assert!((acc - 89.0 / 90.0).abs() < 1e-12);
        assert!((acc - 0.9889).abs() < 1e-4);
    }

    #[test]
    fn accuracy_handles_unequal_label_counts() {
        let truth = vec![0, 0, 1, 1];
        let pred = vec![0, 1, 2, 3];
        let acc = best_match_accuracy(&pred, &truth).unwrap();
        assert_eq!(acc, 0.5);
    }

    #[test]
    fn accuracy_rejects_too_many_labels() {
        let many: Vec<usize> = (0..21).collect();
        let truth = vec![0usize; 21];
        assert!(matches!(
            best_match_accuracy(&many, &truth),
            Err(ClusterError::TooManyClusters { max: 20, got: 21 })
        ));
    }
}
