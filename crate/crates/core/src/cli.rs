//! Command-line front end. Results go to stdout (or `--output`) as JSON,
//! CSV or an edge list; short human summaries go to stderr.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::engine::{count_with_order, EngineKind};
use crate::error::{Error, Result};
use crate::estimator::{automorphism_count, estimate_with, trial_coloring, EstimateOptions};
use crate::graph::{degree_rank, load_edge_list, random_coloring, Coloring, DataGraph, VertexOrdering};
use crate::oracle::{brute_colorful, brute_matches, OracleBudget};
use crate::parallel::{parallel_count_with_report, LoadReport, Partition};
use crate::planner::{enumerate_trees, greedy_tree, select_plan, DecompositionTree, TreeJson};
use crate::query::QueryGraph;
use crate::theory::{
    chung_lu_path_row, path_stats, power_law_degrees, random_permutation, sample_chung_lu, to_csv, ChungLuSpec,
    PathStatsRow,
};

#[derive(Debug, Parser)]
#[command(name = "tw2count", version, about = "Color-coding counts of treewidth-2 query graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decomposition tree of a query, with every enumerated tree and its score.
    Plan {
        #[arg(long)]
        query: PathBuf,
    },
    /// Colorful-match count under one random coloring.
    Count(CountArgs),
    /// Multi-trial color-coding estimate.
    Estimate {
        #[command(flatten)]
        common: CountArgs,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Brute-force match and colorful-match counts.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        colors: Option<usize>,
    },
    /// Sample a power-law Chung-Lu graph and print its edge list.
    GenChunglu {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CSV of degree-topped (X) and id-topped (Y) path counts.
    Pathstats {
        /// Graph to measure; without it, Chung-Lu graphs are sampled for each `--n`.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long = "n")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        /// Path length in vertices.
        #[arg(long, default_value_t = 3)]
        q: usize,
        /// Number of seeds per size, starting at `--seed`.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
    },
    /// PS against DB on the same colorings: wall time, operation counts and load.
    Bench {
        #[command(flatten)]
        common: CountArgs,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long, default_value = "db")]
    pub engine: EngineKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Number of colors (defaults to the query size).
    #[arg(long)]
    pub colors: Option<usize>,
}

fn read_query(path: &Path) -> Result<QueryGraph> {
    QueryGraph::parse(&fs::read_to_string(path)?)
}

fn read_graph(path: &Path) -> Result<DataGraph> {
    let g = load_edge_list(BufReader::new(fs::File::open(path)?))?;
    if g.dropped_self_loops() + g.dropped_duplicates() > 0 {
        eprintln!("dropped {} self-loops and {} duplicate edges", g.dropped_self_loops(), g.dropped_duplicates());
    }
    Ok(g)
}

/// Selected plan and all candidates; falls back to a greedy plan when the
/// plan space is too large to enumerate.
#[derive(Debug, Serialize)]
pub struct PlanOutput {
    pub query: String,
    pub selected: TreeJson,
    pub trees: Vec<TreeJson>,
    pub enumerated: bool,
}

pub fn plan_output(q: &QueryGraph) -> Result<PlanOutput> {
    let (selected, trees, enumerated) = match enumerate_trees(q) {
        Ok(trees) => {
            let jsons = trees.iter().map(DecompositionTree::to_json).collect();
            (select_plan(trees)?, jsons, true)
        }
        Err(Error::TooManyTrees { .. }) => (greedy_tree(q)?, Vec::new(), false),
        Err(e) => return Err(e),
    };
    Ok(PlanOutput { query: q.to_file_format(), selected: selected.to_json(), trees, enumerated })
}

fn plan(q: &QueryGraph) -> Result<DecompositionTree> {
    crate::planner::plan_query(q)
}

struct Loaded {
    g: DataGraph,
    tree: DecompositionTree,
    order: VertexOrdering,
    colors: usize,
}

fn load(args: &CountArgs) -> Result<Loaded> {
    if args.workers == 0 {
        return Err(Error::InvalidArgument("--workers must be at least 1".into()));
    }
    let g = read_graph(&args.graph)?;
    let q = read_query(&args.query)?;
    let tree = plan(&q)?;
    let colors = args.colors.unwrap_or(q.k());
    if colors < q.k() {
        return Err(Error::InvalidArgument(format!("--colors {colors} is below the query size {}", q.k())));
    }
    let order = degree_rank(&g);
    Ok(Loaded { g, tree, order, colors })
}

/// Count with the sequential engine or on `workers` partitions.
fn count_once(l: &Loaded, chi: &Coloring, kind: EngineKind, workers: usize) -> Result<(u64, LoadReport)> {
    if workers == 1 {
        let start = Instant::now();
        let out = count_with_order(&l.g, chi, &l.order, &l.tree, kind)?;
        Ok((out.count, LoadReport::new(vec![out.ops], start.elapsed().as_secs_f64())))
    } else {
        let part = Partition::new(l.g.n(), workers)?;
        parallel_count_with_report(&l.g, chi, &l.order, &l.tree, kind, &part)
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))
}

/// Executes one command and returns the text for stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Plan { query } => {
            let out = plan_output(&read_query(query)?)?;
            eprintln!("{} trees; selected {}", out.trees.len(), out.selected.canonical);
            to_json(&out)
        }
        Command::Count(args) => {
            let l = load(args)?;
            let chi = random_coloring(&l.g, l.colors, args.seed)?;
            let (count, load) = count_once(&l, &chi, args.engine, args.workers)?;
            eprintln!("{count} colorful matches");
            to_json(&json!({
                "count": count,
                "engine": args.engine,
                "seed": args.seed,
                "colors": l.colors,
                "n": l.g.n(),
                "m": l.g.m(),
                "load": load,
            }))
        }
        Command::Estimate { common, trials } => {
            let l = load(common)?;
            let opts = EstimateOptions { trials: *trials, seed: common.seed, colors: Some(l.colors) };
            let report = estimate_with(&l.g, l.tree.query(), opts, |chi| {
                Ok(count_once(&l, chi, common.engine, common.workers)?.0)
            })?;
            eprintln!("mean estimate {:.6} over {} trials", report.mean_estimate, report.trials);
            to_json(&report)
        }
        Command::Oracle { graph, query, seed, colors } => {
            let g = read_graph(graph)?;
            let q = read_query(query)?;
            let budget = OracleBudget::from_env()?;
            let k = colors.unwrap_or(q.k());
            let chi = random_coloring(&g, k, *seed)?;
            let matches = brute_matches(&g, &q, budget)?;
            let colorful = brute_colorful(&g, &q, &chi, budget)?;
            let aut = automorphism_count(&q).ok();
            to_json(&json!({
                "matches": matches,
                "colorful": colorful,
                "seed": seed,
                "colors": k,
                "aut": aut,
                "subgraphs": aut.map(|a| matches / a),
            }))
        }
        Command::GenChunglu { n, alpha, seed } => {
            let spec = ChungLuSpec::from_integers(&power_law_degrees(*n, *alpha, *seed)?)?;
            if !spec.is_dense_enough() {
                eprintln!("note: expected edge count {} is below n = {n}", spec.m());
            }
            let g = sample_chung_lu(&spec, *seed);
            eprintln!("n={} m={} max degree {}", g.n(), g.m(), g.max_degree());
            Ok(g.to_edge_list())
        }
        Command::Pathstats { graph, sizes, alpha, q, seeds, seed, budget } => {
            let mut rows: Vec<PathStatsRow> = Vec::new();
            match graph {
                Some(path) => {
                    let g = read_graph(path)?;
                    let order = degree_rank(&g);
                    for s in *seed..*seed + *seeds {
                        let stats = path_stats(&g, *q, &order, &random_permutation(g.n(), s), *budget)?;
                        rows.push(PathStatsRow::new(g.n(), f64::NAN, s, &stats));
                    }
                }
                None => {
                    if sizes.is_empty() {
                        return Err(Error::InvalidArgument("give --graph or at least one --n".into()));
                    }
                    for &n in sizes {
                        for s in *seed..*seed + *seeds {
                            rows.push(chung_lu_path_row(n, *alpha, s, *q, *budget)?);
                        }
                    }
                }
            }
            Ok(to_csv(&rows))
        }
        Command::Bench { common, trials } => {
            let l = load(common)?;
            if *trials == 0 {
                return Err(Error::InvalidArgument("--trials must be at least 1".into()));
            }
            let mut summary = Vec::new();
            let mut counts: Vec<Vec<u64>> = Vec::new();
            for kind in [EngineKind::Ps, EngineKind::Db] {
                let mut wall = 0.0;
                let mut ops = vec![0u64; common.workers];
                let mut per_trial = Vec::new();
                for t in 0..*trials as u64 {
                    let chi = trial_coloring(l.g.n(), l.colors, common.seed, t)?;
                    let (c, load) = count_once(&l, &chi, kind, common.workers)?;
                    wall += load.wall_time;
                    for (o, x) in ops.iter_mut().zip(&load.per_worker_ops) {
                        *o += x;
                    }
                    per_trial.push(c);
                }
                summary.push((kind, LoadReport::new(ops, wall)));
                counts.push(per_trial);
            }
            let (ps, db) = (&summary[0].1, &summary[1].1);
            let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::INFINITY };
            let total_ops = |r: &LoadReport| r.per_worker_ops.iter().sum::<u64>() as f64;
            let out = json!({
                "trials": trials,
                "seed": common.seed,
                "workers": common.workers,
                "counts_equal": counts[0] == counts[1],
                "counts": counts[1],
                "ps": ps,
                "db": db,
                "improvement_factor": ratio(ps.wall_time, db.wall_time),
                "ops_improvement_factor": ratio(total_ops(ps), total_ops(db)),
            });
            eprintln!(
                "PS {:.3}s, DB {:.3}s, improvement {:.2}x",
                ps.wall_time,
                db.wall_time,
                ratio(ps.wall_time, db.wall_time)
            );
            to_json(&out)
        }
    }
}

/// A closed pipe on the reader's side is not an error.
fn write_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    let newline = if text.ends_with('\n') { "" } else { "\n" };
    match out.write_all(text.as_bytes()).and_then(|()| out.write_all(newline.as_bytes())) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

pub fn error_json(e: &Error) -> String {
    json!({ "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() } }).to_string()
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            println!("{}", json!({ "error": { "kind": "usage", "message": e.to_string(), "exit_code": 2 } }));
            return 2;
        }
    };
    let result = run(&cli).and_then(|text| match &cli.output {
        Some(path) => Ok(fs::write(path, text)?),
        None => write_stdout(&text),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", error_json(&e));
            e.exit_code()
        }
    }
}
