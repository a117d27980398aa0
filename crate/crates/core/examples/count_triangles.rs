//! Colorful triangle count on a random graph, checked against brute force,
//! then turned into an estimate of the triangle count.
//!
//! cargo run --example count_triangles [edge-list-path]

use std::env;
use std::fs::File;
use std::io::BufReader;

use tw2count::engine::{count_colorful, EngineKind};
use tw2count::estimator::{estimate, EstimateOptions};
use tw2count::fixtures::gnp;
use tw2count::graph::{load_edge_list, random_coloring};
use tw2count::oracle::{distinct_subgraphs, OracleBudget};
use tw2count::planner::plan_query;
use tw2count::query::QueryGraph;

fn main() -> tw2count::Result<()> {
    let g = match env::args().nth(1) {
        Some(path) => load_edge_list(BufReader::new(File::open(path)?))?,
        None => gnp(200, 0.05, 1),
    };
    let tree = plan_query(&QueryGraph::cycle(3))?;
    let chi = random_coloring(&g, 3, 42)?;
    println!("graph: n={} m={}", g.n(), g.m());
    for kind in [EngineKind::Ps, EngineKind::Db] {
        println!("{kind}: {} colorful triangle matches", count_colorful(&g, &chi, &tree, kind)?);
    }
    let report = estimate(&g, &tree, EngineKind::Db, EstimateOptions::new(200, 7))?;
    println!(
        "estimated triangles: {:.1} (cv {:.3}); exact: {}",
        report.subgraph_estimate.unwrap_or(f64::NAN),
        report.cv,
        distinct_subgraphs(&g, &QueryGraph::cycle(3), OracleBudget::default())?
    );
    Ok(())
}
