//! Acceptance gate. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use tw2count::cli::plan_output;
use tw2count::engine::{count_colorful, count_with_order, Engine, EngineKind};
use tw2count::estimator::{estimate, EstimateOptions};
use tw2count::fixtures::{connected_graphs, gnp, random_tw2_query};
use tw2count::graph::{degree_rank, random_coloring, DataGraph};
use tw2count::oracle::{brute_colorful, brute_matches, OracleBudget};
use tw2count::parallel::{parallel_count, Partition};
use tw2count::planner::{enumerate_trees, find_blocks, plan_query, BlockKind, DecompositionTree};
use tw2count::query::QueryGraph;
use tw2count::table::{Joiner, ProjectionTable};
use tw2count::theory::{path_stats, power_law_degrees, random_permutation, sample_chung_lu, ChungLuSpec, PathStatsRow};

const ENGINES: [EngineKind; 2] = [EngineKind::Ps, EngineKind::Db];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit_secs: u64, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    if took > Duration::from_secs(limit_secs) {
        return Err(format!("took {took:.1?}, limit {limit_secs}s"));
    }
    Ok(())
}

fn err(e: tw2count::Error) -> String {
    e.to_string()
}

// 1. PS = DB = brute force on every small connected graph.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut graphs: Vec<DataGraph> = (1..=6).flat_map(connected_graphs).collect();
    let exhaustive = graphs.len();
    graphs.extend((0..40).map(|s| gnp(7, 0.5, 1000 + s)));
    let mut queries = vec![
        QueryGraph::cycle(3),
        QueryGraph::cycle(4),
        QueryGraph::cycle(5),
        QueryGraph::path(4),
        QueryGraph::star(4),
    ];
    queries.extend((0..20).map(|s| random_tw2_query(3 + s as usize % 4, 500 + s)));
    let trees: Vec<DecompositionTree> = queries.iter().map(plan_query).collect::<Result<_, _>>().map_err(err)?;
    let (mut runs, mut nonzero) = (0u64, 0u64);
    for (gi, g) in graphs.iter().enumerate() {
        for (qi, (q, tree)) in queries.iter().zip(&trees).enumerate() {
            for c in 0..3u64 {
                let chi = random_coloring(g, q.k(), (gi * 1000 + qi * 10) as u64 + c).map_err(err)?;
                let expected = brute_colorful(g, q, &chi, OracleBudget::default()).map_err(err)?;
                for kind in ENGINES {
                    let got = count_colorful(g, &chi, tree, kind).map_err(err)?;
                    ensure!(got == expected, "{kind} gave {got}, oracle {expected} on graph {gi}, query {q}");
                }
                runs += 1;
                nonzero += (expected > 0) as u64;
            }
        }
    }
    within(300, start)?;
    Ok(format!(
        "{exhaustive} connected graphs (n<=6) + 40 random (n=7) x {} queries x 3 colorings: {runs} cases, {nonzero} nonzero, {:.1?}",
        queries.len(),
        start.elapsed()
    ))
}

fn node_set(nodes: &[usize]) -> BTreeSet<usize> {
    nodes.iter().copied().collect()
}

fn letters(s: &str) -> BTreeSet<usize> {
    s.bytes().map(|c| (c - b'a') as usize).collect()
}

/// Whether `tree` has the reference structure for the sat query.
fn has_reference_structure(tree: &DecompositionTree) -> bool {
    let find = |kind: BlockKind, nodes: &str, boundary: &str| {
        tree.blocks()
            .iter()
            .find(|b| {
                b.kind == kind && node_set(&b.nodes) == letters(nodes) && node_set(&b.boundary) == letters(boundary)
            })
            .map(|b| b.id)
    };
    let children = |id: usize| tree.block(id).children().collect::<BTreeSet<_>>();
    let (Some(pent), Some(leaf), Some(tri)) = (
        find(BlockKind::Cycle, "abcde", "ac"),
        find(BlockKind::LeafEdge, "fh", "f"),
        find(BlockKind::Cycle, "ijk", "i"),
    ) else {
        return false;
    };
    let Some(quad) = tree.blocks().iter().find(|b| node_set(&b.nodes) == letters("afgc")).map(|b| b.id) else {
        return false;
    };
    let Some(root) = tree.root() else { return false };
    tree.blocks().len() == 5
        && children(quad) == BTreeSet::from([pent, leaf])
        && children(root) == BTreeSet::from([quad, tri])
}

// 2. The reference decomposition of the sat query is among the planned trees.
fn sat_plan() -> Outcome {
    let q = QueryGraph::sat();
    let out = plan_output(&q).map_err(err)?;
    let trees = enumerate_trees(&q).map_err(err)?;
    ensure!(out.trees.len() == trees.len(), "plan output lists {} of {} trees", out.trees.len(), trees.len());
    let matching: Vec<&DecompositionTree> = trees.iter().filter(|t| has_reference_structure(t)).collect();
    ensure!(!matching.is_empty(), "no enumerated tree has the reference structure");
    let listed = matching.iter().all(|t| out.trees.iter().any(|j| j.canonical == t.canonical()));
    ensure!(listed, "matching tree missing from plan output");
    let ifg = letters("ifg");
    let initial = find_blocks(&q);
    ensure!(!initial.iter().any(|b| node_set(&b.nodes) == ifg), "cycle (i,f,g) is a block of the initial query");
    // No tree contracts (i,f,g) while it still carries three boundary nodes.
    let with_three = trees.iter().flat_map(|t| t.blocks()).any(|b| node_set(&b.nodes) == ifg && b.boundary.len() > 2);
    ensure!(!with_three, "a tree contracts (i,f,g) with three boundary nodes");
    let selected = &out.selected.canonical;
    Ok(format!(
        "{} trees, {} with reference structure; selected plan {} it ({selected})",
        trees.len(),
        matching.len(),
        if matching.iter().any(|t| &t.canonical() == selected) { "is" } else { "is not" },
    ))
}

// 3. Per-h DB tables sum key-wise to the PS cycle table.
fn per_h_partition() -> Outcome {
    let start = Instant::now();
    let (mut cycles, mut nonempty) = (0, 0);
    for seed in 0..50u64 {
        let q = random_tw2_query(4 + seed as usize % 5, 2000 + seed);
        let g = gnp(16, 0.4, seed);
        let chi = random_coloring(&g, q.k(), seed).map_err(err)?;
        let order = degree_rank(&g);
        let tree = plan_query(&q).map_err(err)?;
        let mut ps = Engine::new(Joiner::new(&g, &chi, &order), EngineKind::Ps);
        let ps_solved = ps.solve_tree(&tree).map_err(err)?;
        let mut db = Engine::new(Joiner::new(&g, &chi, &order), EngineKind::Db);
        let db_solved = db.solve_tree(&tree).map_err(err)?;
        for block in tree.blocks().iter().filter(|b| b.kind == BlockKind::Cycle) {
            let mut sum = ProjectionTable::new(block.boundary.len(), Vec::new());
            for t in db.db_tables_per_h(block, &db_solved).map_err(err)? {
                sum.absorb(&t).map_err(err)?;
            }
            let reference = ps.solve_cycle(block, &ps_solved).map_err(err)?;
            ensure!(sum == reference, "block {} of {q}: per-h sum differs from PS table", block.id);
            cycles += 1;
            nonempty += !reference.is_empty() as usize;
        }
    }
    within(60, start)?;
    ensure!(nonempty * 2 > cycles, "only {nonempty} of {cycles} cycle tables non-empty");
    Ok(format!("50 fixtures, {cycles} cycle blocks ({nonempty} non-empty), {:.1?}", start.elapsed()))
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

// 4. Normalized estimates are unbiased.
fn estimator_unbiased() -> Outcome {
    let start = Instant::now();
    let tri = plan_query(&QueryGraph::cycle(3)).map_err(err)?;
    let r = estimate(&DataGraph::complete(3), &tri, EngineKind::Db, EstimateOptions::new(100_000, 7)).map_err(err)?;
    let tri_mean = r.mean_estimate;
    let rel = (tri_mean - 6.0).abs() / 6.0;
    ensure!(rel < 0.02, "C3 on K3: mean {tri_mean} is {:.2}% from 6", rel * 100.0);

    let g = DataGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 2), (1, 5), (5, 3), (4, 5)]);
    let q = QueryGraph::cycle(4);
    let truth = brute_matches(&g, &q, OracleBudget::default()).map_err(err)? as f64;
    let r =
        estimate(&g, &plan_query(&q).map_err(err)?, EngineKind::Ps, EstimateOptions::new(100_000, 11)).map_err(err)?;
    let (mean, se) = mean_and_se(&r.normalized);
    ensure!((mean - truth).abs() <= 3.0 * se, "C4 on 6-node graph: mean {mean}, truth {truth}, se {se}");
    within(120, start)?;
    Ok(format!(
        "C3/K3 mean {tri_mean:.4} ({:.2}% off); C4 on 6-node graph mean {mean:.3} vs {truth} ({:.2} SE), {:.1?}",
        rel * 100.0,
        (mean - truth).abs() / se,
        start.elapsed()
    ))
}

// 5. Partitioned counts equal sequential counts.
fn parallel_determinism() -> Outcome {
    let start = Instant::now();
    let mut nonzero = 0;
    for seed in 0..20u64 {
        let q = random_tw2_query(3 + seed as usize % 5, 3000 + seed);
        let g = gnp(40 + 3 * seed as usize, 0.15, seed);
        let chi = random_coloring(&g, q.k(), seed).map_err(err)?;
        let tree = plan_query(&q).map_err(err)?;
        for kind in ENGINES {
            let expected = count_colorful(&g, &chi, &tree, kind).map_err(err)?;
            nonzero += (expected > 0) as usize;
            for p in [1, 2, 4, 8] {
                let got =
                    parallel_count(&g, &chi, &tree, kind, &Partition::new(g.n(), p).map_err(err)?).map_err(err)?;
                ensure!(got == expected, "{kind} p={p} fixture {seed}: {got} != {expected}");
            }
        }
    }
    within(120, start)?;
    ensure!(nonzero >= 20, "only {nonzero} of 40 counts nonzero");
    Ok(format!("20 fixtures x 2 engines x p in {{1,2,4,8}}, {nonzero} nonzero counts, {:.1?}", start.elapsed()))
}

// 6. Sampled edge probabilities and expected degrees.
fn chung_lu_fidelity() -> Outcome {
    let start = Instant::now();
    let pair = ChungLuSpec::new(vec![1.0, 1.0]).map_err(err)?;
    let samples = 10_000;
    let hits = (0..samples).filter(|&s| sample_chung_lu(&pair, s).m() == 1).count() as f64;
    let freq = hits / samples as f64;
    let sigma = (0.25 / samples as f64).sqrt();
    ensure!((freq - 0.5).abs() <= 3.0 * sigma, "n=2 edge frequency {freq}, sigma {sigma}");

    let n = 4096;
    let degrees = power_law_degrees(n, 1.5, 1).map_err(err)?;
    let spec = ChungLuSpec::from_integers(&degrees).map_err(err)?;
    let total: f64 = spec.degrees().iter().sum();
    let mut observed = vec![0f64; n];
    let reps = 100;
    for s in 0..reps {
        let g = sample_chung_lu(&spec, 10_000 + s);
        for (v, o) in observed.iter_mut().enumerate() {
            *o += g.degree(v as u32) as f64;
        }
    }
    let mut worst = 0f64;
    for d in degrees.iter().copied().collect::<BTreeSet<u32>>() {
        let members: Vec<usize> = (0..n).filter(|&v| degrees[v] == d).collect();
        let mean = members.iter().map(|&v| observed[v]).sum::<f64>() / (members.len() as f64 * reps as f64);
        // No self-loops: E[deg u] = d_u (S - d_u) / S.
        let expected = d as f64 * (total - d as f64) / total;
        let rel = (mean - expected).abs() / expected;
        worst = worst.max(rel);
        ensure!(rel <= 0.10, "degree-{d} bucket: mean {mean:.3}, expected {expected:.3}");
    }
    within(180, start)?;
    Ok(format!(
        "n=2 frequency {freq:.4} (3 sigma = {:.4}); n=4096 worst bucket deviation {:.2}%, {:.1?}",
        3.0 * sigma,
        worst * 100.0,
        start.elapsed()
    ))
}

fn path_row(n: usize, seed: u64) -> Result<PathStatsRow, String> {
    tw2count::theory::chung_lu_path_row(n, 1.5, seed, 3, 1_000_000_000).map_err(err)
}

// 7. Y/X grows with n; E[Y] = total/3 under random ids.
fn separation_trend() -> Outcome {
    let start = Instant::now();
    let sizes = [1 << 10, 1 << 12, 1 << 14];
    let batches = 20u64;
    let mut increasing = 0;
    let mut last = Vec::new();
    for b in 0..batches {
        let means = sizes
            .iter()
            .map(|&n| {
                let rows = (0..10).map(|s| path_row(n, b * 10 + s)).collect::<Result<Vec<_>, _>>()?;
                Ok(rows.iter().map(|r| r.ratio).sum::<f64>() / rows.len() as f64)
            })
            .collect::<Result<Vec<f64>, String>>()?;
        increasing += (means[0] < means[1] && means[1] < means[2]) as u64;
        last = means;
    }
    let share = increasing as f64 / batches as f64;
    ensure!(share >= 0.95, "Y/X increased in {increasing} of {batches} batches");

    let spec = ChungLuSpec::from_integers(&power_law_degrees(1 << 10, 1.5, 5).map_err(err)?).map_err(err)?;
    let g = sample_chung_lu(&spec, 5);
    let order = degree_rank(&g);
    let perms = 300;
    let ys = (0..perms)
        .map(|s| path_stats(&g, 3, &order, &random_permutation(g.n(), 70_000 + s), 1_000_000_000).map_err(err))
        .collect::<Result<Vec<_>, _>>()?;
    let third = ys[0].total as f64 / 3.0;
    let (mean_y, se) = mean_and_se(&ys.iter().map(|s| s.y as f64).collect::<Vec<_>>());
    ensure!((mean_y - third).abs() <= 3.0 * se, "E[Y] = {mean_y}, total/3 = {third}, se {se}");
    within(600, start)?;
    Ok(format!(
        "Y/X increasing in {increasing}/{batches} batches (last batch means {:.2}, {:.2}, {:.2}); \
         E[Y] {mean_y:.1} vs total/3 {third:.1} ({:.2} SE), {:.1?}",
        last[0],
        last[1],
        last[2],
        (mean_y - third).abs() / se,
        start.elapsed()
    ))
}

// 8. DB does fewer join operations than PS on a skewed graph.
fn db_prunes() -> Outcome {
    let n = 1 << 14;
    let spec = ChungLuSpec::from_integers(&power_law_degrees(n, 1.5, 0).map_err(err)?).map_err(err)?;
    let g = sample_chung_lu(&spec, 0);
    let order = degree_rank(&g);
    let tree = plan_query(&QueryGraph::cycle(5)).map_err(err)?;
    let chi = random_coloring(&g, 5, 0).map_err(err)?;
    let mut runs = Vec::new();
    for kind in ENGINES {
        let start = Instant::now();
        let out = count_with_order(&g, &chi, &order, &tree, kind).map_err(err)?;
        runs.push((out, start.elapsed()));
    }
    let ((ps, ps_t), (db, db_t)) = (&runs[0], &runs[1]);
    ensure!(ps.count == db.count, "counts differ: {} vs {}", ps.count, db.count);
    ensure!(db.ops < ps.ops, "DB ops {} not below PS ops {}", db.ops, ps.ops);
    Ok(format!(
        "C5 on Chung-Lu n=2^14 (m={}): PS {} ops / {:.2?}, DB {} ops / {:.2?}; ops factor {:.2}x, time factor {:.2}x",
        g.m(),
        ps.ops,
        ps_t,
        db.ops,
        db_t,
        ps.ops as f64 / db.ops as f64,
        ps_t.as_secs_f64() / db_t.as_secs_f64()
    ))
}

// 9. Reported cv equals an independent two-pass recomputation.
fn cv_harness() -> Outcome {
    let mut worst = 0f64;
    let mut positive = 0;
    for i in 0..10u64 {
        let q = random_tw2_query(3 + i as usize % 4, 4000 + i);
        let g = gnp(25, 0.3, i);
        let r =
            estimate(&g, &plan_query(&q).map_err(err)?, EngineKind::Db, EstimateOptions::new(10, i)).map_err(err)?;
        let xs: Vec<f64> = r.per_trial_colorful.iter().map(|&x| x as f64).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        let expected = if mean == 0.0 { 0.0 } else { var / mean };
        let diff = (r.cv - expected).abs() / expected.max(1.0);
        worst = worst.max(diff);
        ensure!(diff <= 1e-12, "pair {i}: cv {} vs recomputed {expected}", r.cv);
        positive += (r.cv > 0.0) as usize;
    }
    ensure!(positive >= 5, "only {positive} of 10 pairs have a positive cv");
    Ok(format!("10 pairs x 10 trials, {positive} with cv > 0, worst relative difference {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("sat plan structure", sat_plan),
        ("per-h partition", per_h_partition),
        ("estimator unbiasedness", estimator_unbiased),
        ("parallel determinism", parallel_determinism),
        ("Chung-Lu fidelity", chung_lu_fidelity),
        ("Y/X separation trend", separation_trend),
        ("DB pruning", db_prunes),
        ("cv harness", cv_harness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("acceptance {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
