//! Command-line front end for the dtim library.
//!
//! One subcommand per pipeline stage: ingest -> rank -> weight -> targets ->
//! select / ris-select -> simulate -> sweep / overlap. Every flag can also be
//! set through an environment variable with the `DTIM_` prefix (for example
//! `DTIM_RNG_SEED`). Each subcommand that writes a file also writes a JSON
//! run manifest alongside it (`<output>.manifest.json`).
//!
//! Exit status: 0 on success, 2 on usage errors, 1 on runtime errors.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dtim::error::{DtimError, Result};
use dtim::graph::{NodeId, SocialGraph};
use dtim::manifest::RunManifest;
use dtim::metrics::{overlap_matrix, sweep, write_sweep, SweepConfig};
use dtim::rank::{lurker_rank, write_scores, RankConfig};
use dtim::ris::{
    estimate_kpt, generate_pool, read_rr_cache, refine_kpt, ris_node_selection, rr_diversity,
    write_rr_cache, RisConfig, RisVariant,
};
use dtim::select::{dtim_select, write_seed_result, SelectionConfig, Variant};
use dtim::simulate::estimate_capital;
use dtim::weights::{select_targets, DiffusionGraph, TargetMode, TargetSet};

#[derive(Parser)]
#[command(name = "dtim", version, about = "Diversity-sensitive targeted influence maximization")]
struct Cli {
    /// Cap worker parallelism (default: available cores)
    #[arg(long, global = true, env = "DTIM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Local,
    Global,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Local => Variant::Local,
            VariantArg::Global => Variant::Global,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RisVariantArg {
    Local,
    Global,
    Capital,
}

impl From<RisVariantArg> for RisVariant {
    fn from(v: RisVariantArg) -> RisVariant {
        match v {
            RisVariantArg::Local => RisVariant::Local,
            RisVariantArg::Global => RisVariant::Global,
            RisVariantArg::Capital => RisVariant::CapitalOnly,
        }
    }
}

/// Target-set cut: an absolute node-weight threshold or a top percentage of
/// the weight distribution. Defaults to the top 25%.
#[derive(Args)]
#[group(multiple = false)]
struct TargetArgs {
    /// Absolute node-weight threshold L
    #[arg(long = "L", env = "DTIM_L")]
    threshold: Option<f64>,
    /// Percentile cut: targets are the top given percentage by node weight
    #[arg(long = "L-perc", env = "DTIM_L_PERC")]
    percentile: Option<f64>,
}

impl TargetArgs {
    fn mode(&self) -> TargetMode {
        match (self.threshold, self.percentile) {
            (Some(l), _) => TargetMode::Absolute(l),
            (None, Some(p)) => TargetMode::Percentile(p),
            (None, None) => TargetMode::Percentile(25.0),
        }
    }

    fn describe(&self, manifest: RunManifest) -> RunManifest {
        match self.mode() {
            TargetMode::Absolute(l) => manifest.parameter("L", l),
            TargetMode::Percentile(p) => manifest.parameter("L_perc", p),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Read a raw edge list and write it back in canonical form
    Ingest {
        #[arg(long, env = "DTIM_INPUT")]
        input: PathBuf,
        #[arg(long, env = "DTIM_OUTPUT")]
        output: PathBuf,
    },
    /// Rank silent users on an edge list
    Rank {
        #[arg(long, env = "DTIM_INPUT")]
        input: PathBuf,
        #[arg(long, env = "DTIM_OUTPUT")]
        output: PathBuf,
        #[arg(long, default_value_t = 0.85, env = "DTIM_DAMPING")]
        damping: f64,
        #[arg(long, default_value_t = 1e-9, env = "DTIM_TOLERANCE")]
        tolerance: f64,
        #[arg(long, default_value_t = 200, env = "DTIM_MAX_ITERATIONS")]
        max_iterations: usize,
    },
    /// Derive a weighted diffusion graph from an edge list
    Weight {
        #[arg(long, env = "DTIM_INPUT")]
        input: PathBuf,
        #[arg(long, env = "DTIM_OUTPUT")]
        output: PathBuf,
        #[arg(long, default_value_t = 0.85, env = "DTIM_DAMPING")]
        damping: f64,
        /// Override the regularizer in the node-weight normalization
        #[arg(long, env = "DTIM_EPSILON_R")]
        epsilon_r: Option<f64>,
    },
    /// List the target set of a diffusion graph
    Targets {
        #[arg(long, env = "DTIM_GRAPH")]
        graph: PathBuf,
        #[arg(long, env = "DTIM_OUTPUT")]
        output: PathBuf,
        #[command(flatten)]
        targets: TargetArgs,
    },
    /// Greedy seed selection maximizing the capital/diversity blend
    Select {
        #[arg(long, env = "DTIM_GRAPH")]
        graph: PathBuf,
        #[arg(long, env = "DTIM_OUTPUT")]
        output: PathBuf,
        #[arg(long, value_enum, env = "DTIM_VARIANT")]
        variant: VariantArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), env = "DTIM_K")]
        k: u64,
        #[arg(long, default_value_t = 0.5, env = "DTIM_ALPHA")]
        alpha: f64,
        #[arg(long, default_value_t = 1e-4, env = "DTIM_ETA")]
        eta: f64,
        #[command(flatten)]
        targets: TargetArgs,
    },
    /// Reverse-sampling seed selection
    RisSelect {
        #[arg(long, env = "DTIM_GRAPH")]
        graph: PathBuf,
        #[arg(long, env = "DTIM_OUTPUT")]
        output: PathBuf,
        #[arg(long, value_enum, env = "DTIM_VARIANT")]
        variant: RisVariantArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), env = "DTIM_K")]
        k: u64,
        #[arg(long, default_value_t = 0.5, env = "DTIM_ALPHA")]
        alpha: f64,
        #[arg(long, default_value_t = 0.1, env = "DTIM_EPSILON")]
        epsilon: f64,
        #[arg(long, default_value_t = 0, env = "DTIM_RNG_SEED")]
        rng_seed: u64,
        /// Reuse or persist the sampled pool in a binary cache
        #[arg(long, env = "DTIM_CACHE")]
        cache: Option<PathBuf>,
        #[command(flatten)]
        targets: TargetArgs,
    },
    /// Monte Carlo estimate of the capital captured by a seed set
    Simulate {
        #[arg(long, env = "DTIM_GRAPH")]
        graph: PathBuf,
        /// Seed list: node ids, or the output of `select`
        #[arg(long, env = "DTIM_SEEDS")]
        seeds: PathBuf,
        #[arg(long, env = "DTIM_OUTPUT")]
        output: PathBuf,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..), env = "DTIM_RUNS")]
        runs: u64,
        #[arg(long, default_value_t = 0, env = "DTIM_RNG_SEED")]
        rng_seed: u64,
        #[command(flatten)]
        targets: TargetArgs,
    },
    /// Selection plus simulation over an alpha-times-k grid
    Sweep {
        #[arg(long, env = "DTIM_GRAPH")]
        graph: PathBuf,
        #[arg(long, env = "DTIM_OUTPUT")]
        output: PathBuf,
        #[arg(long, value_enum, env = "DTIM_VARIANT")]
        variant: VariantArg,
        /// Comma-separated alpha values
        #[arg(long, value_delimiter = ',', required = true, env = "DTIM_ALPHAS")]
        alphas: Vec<f64>,
        /// Comma-separated budgets
        #[arg(long, value_delimiter = ',', required = true, env = "DTIM_KS")]
        ks: Vec<u64>,
        #[arg(long, default_value_t = 1e-4, env = "DTIM_ETA")]
        eta: f64,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..), env = "DTIM_RUNS")]
        runs: u64,
        #[arg(long, default_value_t = 0, env = "DTIM_RNG_SEED")]
        rng_seed: u64,
        #[command(flatten)]
        targets: TargetArgs,
    },
    /// Pairwise seed-set overlap across selection outputs
    Overlap {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), env = "DTIM_K")]
        k: u64,
        #[arg(long, env = "DTIM_OUTPUT")]
        output: PathBuf,
        /// Two or more `select` output files
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
    },
    /// Run the built-in 19-node walkthrough fixture and print the chosen seed
    Example2 {
        /// Run only one variant instead of both
        #[arg(long, value_enum, env = "DTIM_VARIANT")]
        variant: Option<VariantArg>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore failure: the global pool may already exist in tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    if let Err(e) = run(cli.command) {
        eprintln!("dtim: {e}");
        std::process::exit(1);
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_manifest(output: &Path, mut manifest: RunManifest, started: Instant) -> Result<()> {
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    let mut path = output.as_os_str().to_owned();
    path.push(".manifest.json");
    let mut writer = create(Path::new(&path))?;
    manifest.write(&mut writer)?;
    writeln!(writer)?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<SocialGraph> {
    let (graph, warnings) = SocialGraph::load_edge_list(open(path)?)?;
    if warnings.duplicate_edges > 0 {
        eprintln!("dtim: dropped {} duplicate edges", warnings.duplicate_edges);
    }
    if warnings.self_loops > 0 {
        eprintln!("dtim: dropped {} self-loops", warnings.self_loops);
    }
    Ok(graph)
}

fn load_diffusion(path: &Path) -> Result<DiffusionGraph> {
    DiffusionGraph::read(open(path)?)
}

/// Maps an original node id back to its dense internal id.
fn internal_id(g: &SocialGraph, original: u64) -> Result<NodeId> {
    g.original_ids()
        .binary_search(&original)
        .map(|i| i as NodeId)
        .map_err(|_| DtimError::InvalidInput(format!("unknown node id {original}")))
}

/// Reads seeds as original node ids: either bare ids (one or more per line)
/// or `select` output lines, whose second column is the node id.
fn load_seeds(g: &SocialGraph, path: &Path) -> Result<Vec<NodeId>> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text)?;
    let mut seeds = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() == 5 {
            let original: u64 = fields[1]
                .parse()
                .map_err(|_| DtimError::InvalidInput(format!("bad seed line: {line}")))?;
            seeds.push(internal_id(g, original)?);
        } else {
            for field in fields {
                let original: u64 = field
                    .parse()
                    .map_err(|_| DtimError::InvalidInput(format!("bad seed id: {field}")))?;
                seeds.push(internal_id(g, original)?);
            }
        }
    }
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.is_empty() {
        return Err(DtimError::InvalidInput("seed file is empty".into()));
    }
    Ok(seeds)
}

fn targets_for(dg: &DiffusionGraph, args: &TargetArgs) -> Result<TargetSet> {
    select_targets(dg.node_weights(), args.mode())
}

fn run(command: Command) -> Result<()> {
    let started = Instant::now();
    match command {
        Command::Ingest { input, output } => {
            let graph = load_graph(&input)?;
            graph.write_edge_list(create(&output)?)?;
            let manifest = RunManifest::new("ingest")
                .parameter("input", input.display())
                .parameter("nodes", graph.node_count())
                .parameter("edges", graph.edge_count());
            write_manifest(&output, with_hash(manifest, graph.content_hash()), started)
        }
        Command::Rank {
            input,
            output,
            damping,
            tolerance,
            max_iterations,
        } => {
            let graph = load_graph(&input)?;
            let cfg = RankConfig {
                damping,
                tolerance,
                max_iterations,
            };
            let ranks = lurker_rank(&graph, &cfg)?;
            write_scores(&graph, &ranks, create(&output)?)?;
            let manifest = RunManifest::new("rank")
                .parameter("input", input.display())
                .parameter("damping", damping)
                .parameter("tolerance", tolerance)
                .parameter("max_iterations", max_iterations)
                .parameter("iterations_used", ranks.iterations_used);
            write_manifest(&output, with_hash(manifest, graph.content_hash()), started)
        }
        Command::Weight {
            input,
            output,
            damping,
            epsilon_r,
        } => {
            let graph = load_graph(&input)?;
            let cfg = RankConfig {
                damping,
                ..RankConfig::default()
            };
            let ranks = lurker_rank(&graph, &cfg)?;
            let hash = graph.content_hash();
            let dg = DiffusionGraph::derive(graph, &ranks, epsilon_r)?;
            dg.write(create(&output)?)?;
            let mut manifest = RunManifest::new("weight")
                .parameter("input", input.display())
                .parameter("damping", damping);
            if let Some(e) = epsilon_r {
                manifest = manifest.parameter("epsilon_r", e);
            }
            write_manifest(&output, with_hash(manifest, hash), started)
        }
        Command::Targets {
            graph,
            output,
            targets,
        } => {
            let dg = load_diffusion(&graph)?;
            let ts = targets_for(&dg, &targets)?;
            let mut writer = create(&output)?;
            for &v in ts.members() {
                writeln!(
                    writer,
                    "{} {:.16e}",
                    dg.graph().original_id(v),
                    dg.node_weight(v)
                )?;
            }
            let manifest = targets
                .describe(RunManifest::new("targets").parameter("graph", graph.display()))
                .parameter("target_count", ts.len());
            write_manifest(
                &output,
                with_hash(manifest, dg.graph().content_hash()),
                started,
            )
        }
        Command::Select {
            graph,
            output,
            variant,
            k,
            alpha,
            eta,
            targets,
        } => {
            let dg = load_diffusion(&graph)?;
            let ts = targets_for(&dg, &targets)?;
            let cfg = SelectionConfig {
                k: k as usize,
                alpha,
                eta,
                variant: variant.into(),
            };
            let result = dtim_select(&dg, &ts, &cfg)?;
            write_seed_result(&dg, &result, create(&output)?)?;
            if result.exhausted {
                eprintln!(
                    "dtim: candidate set exhausted after {} seeds",
                    result.seeds.len()
                );
            }
            let manifest = targets
                .describe(
                    RunManifest::new("select")
                        .parameter("graph", graph.display())
                        .parameter("variant", variant_name(cfg.variant))
                        .parameter("k", k)
                        .parameter("alpha", alpha)
                        .parameter("eta", eta),
                )
                .parameter("seeds_found", result.seeds.len());
            write_manifest(
                &output,
                with_hash(manifest, dg.graph().content_hash()),
                started,
            )
        }
        Command::RisSelect {
            graph,
            output,
            variant,
            k,
            alpha,
            epsilon,
            rng_seed,
            cache,
            targets,
        } => {
            let dg = load_diffusion(&graph)?;
            let ts = targets_for(&dg, &targets)?;
            let cfg = RisConfig {
                k: k as usize,
                alpha,
                epsilon,
                variant: variant.into(),
            };
            let (result, theta) = ris_with_cache(&dg, &ts, &cfg, rng_seed, cache.as_deref())?;
            write_seed_result(&dg, &result, create(&output)?)?;
            let manifest = targets
                .describe(
                    RunManifest::new("ris-select")
                        .parameter("graph", graph.display())
                        .parameter("variant", ris_variant_name(cfg.variant))
                        .parameter("k", k)
                        .parameter("alpha", alpha)
                        .parameter("epsilon", epsilon)
                        .parameter("rng_seed", rng_seed),
                )
                .parameter("theta", theta);
            write_manifest(
                &output,
                with_hash(manifest, dg.graph().content_hash()),
                started,
            )
        }
        Command::Simulate {
            graph,
            seeds,
            output,
            runs,
            rng_seed,
            targets,
        } => {
            let dg = load_diffusion(&graph)?;
            let ts = targets_for(&dg, &targets)?;
            let seed_nodes = load_seeds(dg.graph(), &seeds)?;
            let report = estimate_capital(&dg, &seed_nodes, &ts, runs as usize, rng_seed)?;
            let mut writer = create(&output)?;
            writeln!(writer, "# capital {:.16e}", report.capital_estimate)?;
            writeln!(writer, "# std-error {:.16e}", report.capital_std_error)?;
            writeln!(writer, "# runs {}", report.runs)?;
            writeln!(writer, "# rng-seed {}", report.rng_seed)?;
            for (v, &p) in report.activation_probability.iter().enumerate() {
                writeln!(
                    writer,
                    "{} {:.16e}",
                    dg.graph().original_id(v as NodeId),
                    p
                )?;
            }
            let manifest = targets
                .describe(
                    RunManifest::new("simulate")
                        .parameter("graph", graph.display())
                        .parameter("seeds", seeds.display())
                        .parameter("runs", runs)
                        .parameter("rng_seed", rng_seed),
                )
                .parameter("capital", format!("{:.16e}", report.capital_estimate));
            write_manifest(
                &output,
                with_hash(manifest, dg.graph().content_hash()),
                started,
            )
        }
        Command::Sweep {
            graph,
            output,
            variant,
            alphas,
            ks,
            eta,
            runs,
            rng_seed,
            targets,
        } => {
            let dg = load_diffusion(&graph)?;
            let ts = targets_for(&dg, &targets)?;
            let cfg = SweepConfig {
                variant: variant.into(),
                eta,
                runs: runs as usize,
                rng_seed,
            };
            let ks: Vec<usize> = ks.into_iter().map(|k| k as usize).collect();
            let rows = sweep(&dg, &ts, &alphas, &ks, &cfg)?;
            write_sweep(&dg, &rows, &cfg, create(&output)?)?;
            let manifest = targets
                .describe(
                    RunManifest::new("sweep")
                        .parameter("graph", graph.display())
                        .parameter("variant", variant_name(cfg.variant))
                        .parameter("alphas", join(&alphas))
                        .parameter("ks", join(&ks))
                        .parameter("eta", eta)
                        .parameter("runs", runs)
                        .parameter("rng_seed", rng_seed),
                )
                .parameter("rows", rows.len());
            write_manifest(
                &output,
                with_hash(manifest, dg.graph().content_hash()),
                started,
            )
        }
        Command::Overlap { k, output, inputs } => {
            let mut runs = Vec::with_capacity(inputs.len());
            for path in &inputs {
                let mut text = String::new();
                open(path)?.read_to_string(&mut text)?;
                let mut seeds = Vec::new();
                for line in text.lines() {
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    if fields.len() == 5 {
                        let id: u64 = fields[1].parse().map_err(|_| {
                            DtimError::InvalidInput(format!("bad seed line in {}", path.display()))
                        })?;
                        // overlap works on raw ids; no graph context needed
                        seeds.push(id as NodeId);
                    }
                }
                runs.push((path.display().to_string(), seeds));
            }
            let matrix = overlap_matrix(&runs, k as usize)?;
            let mut writer = create(&output)?;
            writeln!(writer, "run\t{}", matrix.labels.join("\t"))?;
            for (label, row) in matrix.labels.iter().zip(&matrix.values) {
                let cells = row
                    .iter()
                    .map(|v| format!("{v:.6}"))
                    .collect::<Vec<_>>()
                    .join("\t");
                writeln!(writer, "{label}\t{cells}")?;
            }
            let manifest = RunManifest::new("overlap")
                .parameter("k", k)
                .parameter("inputs", inputs.len());
            write_manifest(&output, manifest, started)
        }
        Command::Example2 { variant } => {
            let dg = dtim::fixture::example_two();
            let ts = dtim::fixture::example_two_targets(&dg)?;
            let variants: Vec<Variant> = match variant {
                Some(v) => vec![v.into()],
                None => vec![Variant::Local, Variant::Global],
            };
            for v in variants {
                let cfg = SelectionConfig {
                    k: 1,
                    alpha: 0.5,
                    eta: 1e-4,
                    variant: v,
                };
                let result = dtim_select(&dg, &ts, &cfg)?;
                let seed = result.seeds[0].node;
                println!("seed: {}", fixture_name(seed));
            }
            Ok(())
        }
    }
}

fn with_hash(mut manifest: RunManifest, hash: String) -> RunManifest {
    manifest.input_hash = Some(hash);
    manifest
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Local => "local",
        Variant::Global => "global",
    }
}

fn ris_variant_name(v: RisVariant) -> &'static str {
    match v {
        RisVariant::Local => "local",
        RisVariant::Global => "global",
        RisVariant::CapitalOnly => "capital",
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Letter names of the walkthrough fixture nodes, in internal-id order.
fn fixture_name(v: NodeId) -> String {
    const NAMES: [&str; 11] = ["t", "e", "c", "g", "b", "h", "d", "f", "a", "u1", "u2"];
    if (v as usize) < NAMES.len() {
        NAMES[v as usize].to_string()
    } else {
        format!("cloud{v}")
    }
}

/// RIS selection with an optional binary pool cache. Returns the result and
/// the pool size used.
fn ris_with_cache(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    cfg: &RisConfig,
    rng_seed: u64,
    cache: Option<&Path>,
) -> Result<(dtim::select::SeedResult, usize)> {
    let pool = match cache {
        Some(path) if path.exists() => {
            let (pool, cached_seed) = read_rr_cache(dg, ts, open(path)?)?;
            if cached_seed != rng_seed {
                return Err(DtimError::InvalidInput(format!(
                    "cache was sampled with rng seed {cached_seed}, not {rng_seed}"
                )));
            }
            pool
        }
        _ => {
            let (estimate, pool) = estimate_kpt(dg, ts, cfg.k, cfg.epsilon, rng_seed)?;
            let refined = refine_kpt(dg, ts, cfg.k, &estimate, &pool, rng_seed)?;
            let final_pool = generate_pool(dg, ts, refined.theta, rng_seed, 2)?;
            if let Some(path) = cache {
                write_rr_cache(dg, &final_pool, rng_seed, create(path)?)?;
            }
            final_pool
        }
    };
    let theta = pool.len();
    let diversity = if cfg.variant == RisVariant::CapitalOnly || cfg.alpha == 1.0 {
        None
    } else {
        let mut scores = rr_diversity(dg, &pool, cfg.variant);
        dtim::diversity::max_normalize(&mut scores);
        Some(scores)
    };
    let result = ris_node_selection(dg, ts, &pool, cfg.k, cfg.alpha, diversity.as_deref())?;
    Ok((result, theta))
}
