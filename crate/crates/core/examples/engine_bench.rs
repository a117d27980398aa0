//! Wall time and join-operation counts of the two cycle engines on a
//! power-law graph.
//!
//! cargo run --release --example engine_bench [log2-n]

use std::time::Instant;

use tw2count::engine::{count_with_order, EngineKind};
use tw2count::graph::{degree_rank, random_coloring};
use tw2count::planner::plan_query;
use tw2count::query::QueryGraph;
use tw2count::theory::{power_law_degrees, sample_chung_lu, ChungLuSpec};

fn main() -> tw2count::Result<()> {
    let log_n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(14);
    let g = sample_chung_lu(&ChungLuSpec::from_integers(&power_law_degrees(1 << log_n, 1.5, 0)?)?, 0);
    let order = degree_rank(&g);
    println!("n={} m={}", g.n(), g.m());
    for q in [QueryGraph::cycle(4), QueryGraph::cycle(5), QueryGraph::cycle(6)] {
        let tree = plan_query(&q)?;
        let chi = random_coloring(&g, q.k(), 0)?;
        let mut line = format!("C{}:", q.k());
        let mut times = Vec::new();
        for kind in [EngineKind::Ps, EngineKind::Db] {
            let start = Instant::now();
            let out = count_with_order(&g, &chi, &order, &tree, kind)?;
            times.push(start.elapsed().as_secs_f64());
            line += &format!(" {kind} count {} ops {} {:.3}s;", out.count, out.ops, times[times.len() - 1]);
        }
        println!("{line} improvement {:.2}x", times[0] / times[1]);
    }
    Ok(())
}
