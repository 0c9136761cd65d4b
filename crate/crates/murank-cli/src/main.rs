//! Command-line surface: compute / sweep / verify / overlap / cluster / walk.
//!
//! Inputs are edge lists ("u v" per line, '#' comments) or GML when the
//! file ends in .gml. Outputs are CSV with a header, deterministic row
//! order, and numbers at 12 significant digits; every file output gets a
//! `<out>.manifest` key = value record of the full run. Exit codes:
//! 0 success, 1 computational failure or failed verification, 2 usage.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use murank::cluster::{best_match_accuracy, cluster_restarts, nmi};
use murank::experiment::{
    linspace, monte_carlo_walk, mu_sweep, overlap_experiment, Verdict, DEFAULT_TOL_MONO,
};
use murank::generate::{derive_stream_seed, generate, GeneratorSpec};
use murank::graph::Graph;
use murank::io::{parse_edge_list, parse_gml};
use murank::solver::{biregular_closed_form, mu_pagerank, Method, Mu, PageRankConfig, Teleport};
use murank::LiftMode;

use manifest::Manifest;

#[derive(Parser)]
#[command(
    name = "murank",
    version,
    about = "PageRank variants on the directed-edge lift of undirected graphs"
)]
struct Cli {
    /// Thread count for parallel sections (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute standard, non-backtracking, mu- or infinity-PageRank
    Compute(ComputeArgs),
    /// Sweep mu over a grid and classify per-node monotonicity
    Sweep(SweepArgs),
    /// Check the regular/biregular equivalence theorems on random instances
    Verify(VerifyArgs),
    /// Compare top-k overlap of standard vs infinity PageRank over a model
    Overlap(OverlapArgs),
    /// Cluster with personalized infinity-PageRank vectors
    Cluster(ClusterArgs),
    /// Simulate the lifted random walk and report visit frequencies
    Walk(WalkArgs),
}

/// The teleportation parameter under either of its two names
/// (alpha = 1 - epsilon).
#[derive(Args)]
struct EpsilonArg {
    /// Teleportation parameter epsilon in (0,1)
    #[arg(long, global = true, conflicts_with = "alpha")]
    epsilon: Option<f64>,
    /// Jumping factor alpha = 1 - epsilon (alternative spelling)
    #[arg(long, global = true)]
    alpha: Option<f64>,
}

impl EpsilonArg {
    fn resolve(&self) -> f64 {
        match (self.epsilon, self.alpha) {
            (Some(e), _) => e,
            (None, Some(a)) => 1.0 - a,
            (None, None) => 0.85,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "tail-degree")]
    TailDegree,
    #[value(name = "head-copy")]
    HeadCopy,
}

impl From<ModeArg> for LiftMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::TailDegree => LiftMode::TailDegree,
            ModeArg::HeadCopy => LiftMode::HeadCopy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Power,
    Linear,
}

impl From<MethodArg> for Method {
    fn from(method: MethodArg) -> Self {
        match method {
            MethodArg::Power => Method::Power,
            MethodArg::Linear => Method::LinearSeries,
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    /// Graph file (edge list, or GML if the extension is .gml)
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    eps: EpsilonArg,
    /// Backtrack weight: a nonnegative number, or "inf" for the limit
    #[arg(long, default_value = "1")]
    mu: String,
    #[arg(long, value_enum, default_value = "tail-degree")]
    mode: ModeArg,
    /// "uniform" or a file with one teleport weight per node (index order)
    #[arg(long, default_value = "uniform")]
    teleport: String,
    #[arg(long, value_enum, default_value = "power")]
    method: MethodArg,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Output CSV: node, value, rank
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    eps: EpsilonArg,
    /// Grid as A:B:COUNT (COUNT evenly spaced values from A to B)
    #[arg(long, default_value = "0:100:20")]
    grid: String,
    /// Sign-change tolerance for the monotonicity verdicts
    #[arg(long, default_value_t = DEFAULT_TOL_MONO)]
    tol_mono: f64,
    /// Output CSV: mu, range_width, node, value, verdict
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Regular,
    Biregular,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// regular: n=..,k=..   biregular: n1=..,n2=..,d1=..,d2=..
    #[arg(long)]
    params: String,
    #[command(flatten)]
    eps: EpsilonArg,
    /// Comma-separated mu values to compare against mu = 1
    #[arg(long, default_value = "0,0.3,2,10")]
    mus: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random instances to check
    #[arg(long, default_value_t = 1)]
    instances: usize,
    /// Optional CSV of per-instance gaps
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OverlapArgs {
    /// Model spec, e.g. gnp:n=1000,p=0.01 | pareto-cl:n=1000,shape=2.5,wmin=6
    /// | sbm:sizes=30+30+30,pin=0.9,pout=0.1 | regular:n=20,k=3
    /// | biregular:n1=6,n2=4,d1=2,d2=3
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated top-percent levels
    #[arg(long, default_value = "1,5,10,20")]
    percents: String,
    #[command(flatten)]
    eps: EpsilonArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV: trial, percent, overlap (plus mean rows)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    eps: EpsilonArg,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Ground truth: "gml-value" (the GML value attribute) or a file with
    /// one integer label per node (index order)
    #[arg(long)]
    truth: Option<String>,
    /// Output CSV: node, label (and truth when given)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    eps: EpsilonArg,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV: node, frequency
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        configure_threads(threads);
    }
    let outcome = match cli.command {
        Command::Compute(args) => run_compute(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Verify(args) => run_verify(args),
        Command::Overlap(args) => run_overlap(args),
        Command::Cluster(args) => run_cluster(args),
        Command::Walk(args) => run_walk(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: usize) {
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        eprintln!("warning: could not configure thread pool: {e}");
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: usize) {
    eprintln!("warning: built without the parallel feature; --threads ignored");
}

/// 12 significant digits, stable across platforms.
fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

struct LoadedGraph {
    graph: Graph,
    labels: Vec<String>,
    gml_values: Option<Vec<Option<i64>>>,
    bytes: Vec<u8>,
}

fn load_graph(path: &Path) -> Result<LoadedGraph> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = String::from_utf8(bytes.clone())
        .with_context(|| format!("{} is not valid UTF-8", path.display()))?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gml"))
    {
        let parsed = parse_gml(&text)?;
        for warning in &parsed.warnings {
            eprintln!("warning: {warning}");
        }
        Ok(LoadedGraph {
            graph: parsed.graph,
            labels: parsed.labels,
            gml_values: Some(parsed.values),
            bytes,
        })
    } else {
        let parsed = parse_edge_list(&text)?;
        Ok(LoadedGraph {
            graph: parsed.graph,
            labels: parsed.labels,
            gml_values: None,
            bytes,
        })
    }
}

fn parse_mu(text: &str) -> Result<Mu> {
    match text.trim() {
        "inf" | "infinity" | "Inf" => Ok(Mu::Infinity),
        other => {
            let value: f64 = other
                .parse()
                .map_err(|_| anyhow!("--mu expects a number or \"inf\", got {other:?}"))?;
            Ok(Mu::Finite(value))
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("bad number {t:?} in list"))
        })
        .collect()
}

/// Ranks by value descending, ties to the lower node index; rank is 1-based.
fn ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let mut rank = vec![0usize; values.len()];
    for (position, &node) in order.iter().enumerate() {
        rank[node] = position + 1;
    }
    rank
}

fn run_compute(args: ComputeArgs) -> Result<ExitCode> {
    let loaded = load_graph(&args.input)?;
    let mu = parse_mu(&args.mu)?;
    let mut cfg = PageRankConfig::new(args.eps.resolve());
    cfg.mu = mu;
    cfg.mode = args.mode.into();
    cfg.method = args.method.into();
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    if args.teleport != "uniform" {
        let path = PathBuf::from(&args.teleport);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading teleport file {}", path.display()))?;
        let weights = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.parse::<f64>().map_err(|_| anyhow!("bad weight {l:?}")))
            .collect::<Result<Vec<f64>>>()?;
        cfg.teleport = Teleport::Custom(weights);
    }

    let result = mu_pagerank(&loaded.graph, &cfg)?;
    let values = &result.node.values;
    let rank = ranks(values);

    let mut writer = csv::Writer::from_path(&args.out)?;
    writer.write_record(["node", "value", "rank"])?;
    for (node, label) in loaded.labels.iter().enumerate() {
        writer.write_record([label.as_str(), &sig(values[node]), &rank[node].to_string()])?;
    }
    writer.flush()?;

    let mut manifest = Manifest::new("compute");
    manifest.push_input("input", &args.input, &loaded.bytes);
    manifest.push("epsilon", sig(cfg.epsilon));
    manifest.push("mu", args.mu.trim());
    manifest.push("mode", format!("{:?}", cfg.mode));
    manifest.push("teleport", &args.teleport);
    manifest.push("method", format!("{:?}", cfg.method));
    manifest.push("tol", sig(cfg.tol));
    manifest.push("max_iter", cfg.max_iter);
    manifest.push("iterations", result.node.iterations);
    manifest.push("residual", sig(result.node.residual));
    manifest.write_for(&args.out)?;
    println!(
        "wrote {} ({} nodes, {} iterations, residual {:.2e})",
        args.out.display(),
        loaded.graph.node_count(),
        result.node.iterations,
        result.node.residual
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("--grid expects A:B:COUNT, got {text:?}");
    }
    let a: f64 = parts[0].parse().map_err(|_| anyhow!("bad grid start"))?;
    let b: f64 = parts[1].parse().map_err(|_| anyhow!("bad grid end"))?;
    let count: usize = parts[2].parse().map_err(|_| anyhow!("bad grid count"))?;
    if count == 0 {
        bail!("--grid needs at least one point");
    }
    Ok(linspace(a, b, count))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Increasing => "increasing",
        Verdict::Decreasing => "decreasing",
        Verdict::Constant => "constant",
        Verdict::NonMonotone => "non-monotone",
    }
}

fn run_sweep(args: SweepArgs) -> Result<ExitCode> {
    let loaded = load_graph(&args.input)?;
    let grid = parse_grid(&args.grid)?;
    let epsilon = args.eps.resolve();
    let result = mu_sweep(&loaded.graph, epsilon, &grid, args.tol_mono)?;
    for (index, reason) in &result.failures {
        eprintln!("warning: solver failed at mu = {}: {reason}", grid[*index]);
    }

    let mut writer = csv::Writer::from_path(&args.out)?;
    writer.write_record(["mu", "range_width", "node", "value", "verdict"])?;
    for (row, &mu) in result.mu_grid.iter().enumerate() {
        let Some(values) = &result.values[row] else {
            continue;
        };
        let width = result.range_widths[row].unwrap_or(f64::NAN);
        for (node, label) in loaded.labels.iter().enumerate() {
            writer.write_record([
                &sig(mu),
                &sig(width),
                label.as_str(),
                &sig(values[node]),
                verdict_name(result.verdicts[node]),
            ])?;
        }
    }
    writer.flush()?;

    let mut manifest = Manifest::new("sweep");
    manifest.push_input("input", &args.input, &loaded.bytes);
    manifest.push("epsilon", sig(epsilon));
    manifest.push("grid", &args.grid);
    manifest.push("tol_mono", sig(args.tol_mono));
    manifest.push("failures", result.failures.len());
    manifest.write_for(&args.out)?;
    println!(
        "wrote {} ({} grid points x {} nodes; range shrinks: {})",
        args.out.display(),
        grid.len(),
        loaded.graph.node_count(),
        result.range_shrinks(1e-12)
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_kv(text: &str) -> Result<std::collections::BTreeMap<String, String>> {
    let mut map = std::collections::BTreeMap::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got {part:?}"))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn kv_usize(map: &std::collections::BTreeMap<String, String>, key: &str) -> Result<usize> {
    map.get(key)
        .ok_or_else(|| anyhow!("missing parameter {key}"))?
        .parse()
        .map_err(|_| anyhow!("parameter {key} must be an integer"))
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode> {
    let params = parse_kv(&args.params)?;
    let epsilon = args.eps.resolve();
    let mus = parse_list(&args.mus)?;
    let mut max_gap: f64 = 0.0;
    let mut rows: Vec<(usize, f64, f64)> = Vec::new();

    for instance in 0..args.instances {
        let instance_seed = derive_stream_seed(args.seed, instance as u64);
        let (graph, closed_form) = match args.family {
            Family::Regular => {
                let n = kv_usize(&params, "n")?;
                let k = kv_usize(&params, "k")?;
                let g = connected_instance(instance_seed, |seed| GeneratorSpec::Regular {
                    n,
                    degree: k,
                    seed,
                })?;
                (g, None)
            }
            Family::Biregular => {
                let n1 = kv_usize(&params, "n1")?;
                let n2 = kv_usize(&params, "n2")?;
                let d1 = kv_usize(&params, "d1")?;
                let d2 = kv_usize(&params, "d2")?;
                let g = connected_instance(instance_seed, |seed| GeneratorSpec::Biregular {
                    n1,
                    n2,
                    d1,
                    d2,
                    seed,
                })?;
                (g, Some(biregular_closed_form(n1, n2, d1, d2, epsilon)?))
            }
        };
        let reference = mu_pagerank(&graph, &PageRankConfig::new(epsilon))?;
        for &mu in &mus {
            let mut cfg = PageRankConfig::new(epsilon);
            cfg.mu = Mu::Finite(mu);
            let result = mu_pagerank(&graph, &cfg)?;
            let mut gap = max_abs_diff(&result.node.values, &reference.node.values);
            if let Some(closed) = &closed_form {
                gap = gap.max(max_abs_diff(&result.node.values, closed));
                gap = gap.max(max_abs_diff(&reference.node.values, closed));
            }
            max_gap = max_gap.max(gap);
            rows.push((instance, mu, gap));
        }
    }

    if let Some(out) = &args.out {
        let mut writer = csv::Writer::from_path(out)?;
        writer.write_record(["instance", "mu", "gap"])?;
        for (instance, mu, gap) in &rows {
            writer.write_record([&instance.to_string(), &sig(*mu), &sig(*gap)])?;
        }
        writer.flush()?;
        let mut manifest = Manifest::new("verify");
        manifest.push("family", format!("{:?}", args.family));
        manifest.push("params", &args.params);
        manifest.push("epsilon", sig(epsilon));
        manifest.push("mus", &args.mus);
        manifest.push("tol", sig(args.tol));
        manifest.push("seed", args.seed);
        manifest.push("instances", args.instances);
        manifest.push("max_gap", sig(max_gap));
        manifest.write_for(out)?;
    }

    println!("max gap = {max_gap:e} (tol {:e})", args.tol);
    if max_gap <= args.tol {
        println!("equivalence verified");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("equivalence FAILED");
        Ok(ExitCode::from(1))
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn connected_instance(seed: u64, spec_for: impl Fn(u64) -> GeneratorSpec) -> Result<Graph> {
    for attempt in 0..1000u64 {
        let out = generate(&spec_for(derive_stream_seed(seed, attempt)))?;
        if out.graph.is_connected() {
            return Ok(out.graph);
        }
    }
    bail!("could not draw a connected instance in 1000 attempts")
}

fn parse_model(text: &str, seed: u64) -> Result<GeneratorSpec> {
    let (name, rest) = text.split_once(':').unwrap_or((text, ""));
    let params = parse_kv(rest)?;
    let kv_f64 = |key: &str| -> Result<f64> {
        params
            .get(key)
            .ok_or_else(|| anyhow!("model {name} needs parameter {key}"))?
            .parse()
            .map_err(|_| anyhow!("parameter {key} must be a number"))
    };
    match name {
        "gnp" => Ok(GeneratorSpec::Gnp {
            n: kv_usize(&params, "n")?,
            p: kv_f64("p")?,
            seed,
        }),
        "regular" => Ok(GeneratorSpec::Regular {
            n: kv_usize(&params, "n")?,
            degree: kv_usize(&params, "k")?,
            seed,
        }),
        "biregular" => Ok(GeneratorSpec::Biregular {
            n1: kv_usize(&params, "n1")?,
            n2: kv_usize(&params, "n2")?,
            d1: kv_usize(&params, "d1")?,
            d2: kv_usize(&params, "d2")?,
            seed,
        }),
        "pareto-cl" => Ok(GeneratorSpec::ParetoCl {
            n: kv_usize(&params, "n")?,
            shape: kv_f64("shape")?,
            min_weight: kv_f64("wmin")?,
            seed,
        }),
        "sbm" => {
            let sizes = params
                .get("sizes")
                .ok_or_else(|| anyhow!("sbm needs sizes=a+b+..."))?
                .split('+')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| anyhow!("bad size {s:?}"))
                })
                .collect::<Result<Vec<usize>>>()?;
            Ok(GeneratorSpec::Sbm {
                sizes,
                p_in: kv_f64("pin")?,
                p_out: kv_f64("pout")?,
                seed,
            })
        }
        other => bail!("unknown model {other:?}"),
    }
}

fn run_overlap(args: OverlapArgs) -> Result<ExitCode> {
    let spec = parse_model(&args.model, args.seed)?;
    let percents = parse_list(&args.percents)?;
    let epsilon = args.eps.resolve();
    let report = overlap_experiment(&spec, args.trials, &percents, epsilon)?;

    let mut writer = csv::Writer::from_path(&args.out)?;
    writer.write_record(["trial", "percent", "overlap"])?;
    for (trial, row) in report.per_trial.iter().enumerate() {
        let Some(overlaps) = row else { continue };
        for (&percent, &overlap) in percents.iter().zip(overlaps) {
            writer.write_record([&trial.to_string(), &sig(percent), &sig(overlap)])?;
        }
    }
    for (&percent, &mean) in percents.iter().zip(&report.mean_overlap) {
        writer.write_record(["mean", &sig(percent), &sig(mean)])?;
    }
    writer.flush()?;

    for (trial, reason) in &report.skipped {
        eprintln!("warning: trial {trial} skipped: {reason}");
    }
    for (&percent, &mean) in percents.iter().zip(&report.mean_overlap) {
        println!("top {percent}%: mean overlap {mean:.4}");
    }
    println!("mean degree {:.2}", report.mean_degree);

    let mut manifest = Manifest::new("overlap");
    manifest.push("model", &args.model);
    manifest.push("trials", args.trials);
    manifest.push("percents", &args.percents);
    manifest.push("epsilon", sig(epsilon));
    manifest.push("seed", args.seed);
    manifest.push("skipped", report.skipped.len());
    manifest.write_for(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn run_cluster(args: ClusterArgs) -> Result<ExitCode> {
    let loaded = load_graph(&args.input)?;
    let epsilon = args.eps.resolve();
    let model = cluster_restarts(
        &loaded.graph,
        args.k,
        epsilon,
        args.tol,
        args.seed,
        args.restarts,
        args.max_iter,
    )?;

    let truth: Option<Vec<usize>> = match args.truth.as_deref() {
        None => None,
        Some("gml-value") => {
            let values = loaded
                .gml_values
                .as_ref()
                .ok_or_else(|| anyhow!("--truth gml-value requires a .gml input"))?;
            Some(
                values
                    .iter()
                    .enumerate()
                    .map(|(node, v)| {
                        v.map(|x| x as usize)
                            .ok_or_else(|| anyhow!("node {node} has no value attribute"))
                    })
                    .collect::<Result<Vec<usize>>>()?,
            )
        }
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading truth file {path}"))?;
            let labels = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| l.parse::<usize>().map_err(|_| anyhow!("bad label {l:?}")))
                .collect::<Result<Vec<usize>>>()?;
            if labels.len() != loaded.graph.node_count() {
                bail!(
                    "truth file has {} labels for {} nodes",
                    labels.len(),
                    loaded.graph.node_count()
                );
            }
            Some(labels)
        }
    };

    let mut writer = csv::Writer::from_path(&args.out)?;
    if truth.is_some() {
        writer.write_record(["node", "label", "truth"])?;
    } else {
        writer.write_record(["node", "label"])?;
    }
    for (node, label) in loaded.labels.iter().enumerate() {
        match &truth {
            Some(t) => writer.write_record([
                label.as_str(),
                &model.labels[node].to_string(),
                &t[node].to_string(),
            ])?,
            None => writer.write_record([label.as_str(), &model.labels[node].to_string()])?,
        }
    }
    writer.flush()?;

    println!(
        "clustered {} nodes into {} clusters in {} iterations (final error {:.2e}, objective {:.6})",
        loaded.graph.node_count(),
        args.k,
        model.iterations,
        model.final_error,
        model.objective
    );
    let mut manifest = Manifest::new("cluster");
    manifest.push_input("input", &args.input, &loaded.bytes);
    manifest.push("k", args.k);
    manifest.push("epsilon", sig(epsilon));
    manifest.push("tol", sig(args.tol));
    manifest.push("seed", args.seed);
    manifest.push("restarts", args.restarts);
    manifest.push("max_iter", args.max_iter);
    manifest.push("iterations", model.iterations);
    manifest.push("winning_seed", model.seed);
    manifest.push("objective", sig(model.objective));
    if let Some(t) = &truth {
        let accuracy = best_match_accuracy(&model.labels, t)?;
        let info = nmi(&model.labels, t)?;
        println!("accuracy = {accuracy:.4}");
        println!("nmi = {info:.4}");
        manifest.push("accuracy", sig(accuracy));
        manifest.push("nmi", sig(info));
    }
    manifest.write_for(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn run_walk(args: WalkArgs) -> Result<ExitCode> {
    let loaded = load_graph(&args.input)?;
    let epsilon = args.eps.resolve();
    let freq = monte_carlo_walk(&loaded.graph, epsilon, args.mu, args.steps, args.seed)?;

    let mut writer = csv::Writer::from_path(&args.out)?;
    writer.write_record(["node", "frequency"])?;
    for (node, label) in loaded.labels.iter().enumerate() {
        writer.write_record([label.as_str(), &sig(freq[node])])?;
    }
    writer.flush()?;

    let mut manifest = Manifest::new("walk");
    manifest.push_input("input", &args.input, &loaded.bytes);
    manifest.push("epsilon", sig(epsilon));
    manifest.push("mu", sig(args.mu));
    manifest.push("steps", args.steps);
    manifest.push("seed", args.seed);
    manifest.write_for(&args.out)?;
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let grid = parse_grid("0:100:20").unwrap();
        assert_eq!(grid.len(), 20);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[19], 100.0);
        assert!(parse_grid("0:100").is_err());
        assert!(parse_grid("0:100:0").is_err());
        // default grid matches the library's
        assert_eq!(grid, murank::experiment::default_mu_grid());
    }

    #[test]
    fn mu_parsing() {
        assert_eq!(parse_mu("inf").unwrap(), Mu::Infinity);
        assert_eq!(parse_mu("0.5").unwrap(), Mu::Finite(0.5));
        assert!(parse_mu("banana").is_err());
    }

    #[test]
    fn model_parsing() {
        let spec = parse_model("sbm:sizes=30+30+30,pin=0.9,pout=0.1", 7).unwrap();
        assert_eq!(
            spec,
            GeneratorSpec::Sbm {
                sizes: vec![30, 30, 30],
                p_in: 0.9,
                p_out: 0.1,
                seed: 7
            }
        );
        assert!(parse_model("nope:n=3", 0).is_err());
        assert!(parse_model("gnp:n=10", 0).is_err()); // missing p
    }

    #[test]
    fn rank_ordering() {
        let rank = ranks(&[0.2, 0.5, 0.2, 0.1]);
        assert_eq!(rank, vec![2, 1, 3, 4]);
    }

    #[test]
    fn sig_has_12_digits() {
        assert_eq!(sig(0.85), "8.50000000000e-1");
        assert_eq!(sig(1.0 / 3.0), "3.33333333333e-1");
    }
}
