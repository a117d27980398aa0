//! Per-worker load of both engines on a skewed Chung-Lu graph, for several
//! worker counts. Counts are identical for every partition.
//!
//! cargo run --release --example parallel_load

use tw2count::engine::EngineKind;
use tw2count::graph::{degree_rank, random_coloring};
use tw2count::parallel::{parallel_count_with_report, Partition};
use tw2count::planner::plan_query;
use tw2count::query::QueryGraph;
use tw2count::theory::{power_law_degrees, sample_chung_lu, ChungLuSpec};

fn main() -> tw2count::Result<()> {
    let g = sample_chung_lu(&ChungLuSpec::from_integers(&power_law_degrees(1 << 13, 1.5, 2)?)?, 2);
    let order = degree_rank(&g);
    let tree = plan_query(&QueryGraph::cycle(5))?;
    let chi = random_coloring(&g, 5, 9)?;
    println!("n={} m={} max degree {}", g.n(), g.m(), g.max_degree());
    for kind in [EngineKind::Ps, EngineKind::Db] {
        for p in [1, 2, 4, 8] {
            let (count, load) = parallel_count_with_report(&g, &chi, &order, &tree, kind, &Partition::new(g.n(), p)?)?;
            println!(
                "{kind} p={p}: count {count}, max ops {}, avg ops {:.0}, imbalance {:.2}, {:.3}s",
                load.max_ops,
                load.avg_ops,
                load.imbalance(),
                load.wall_time
            );
        }
    }
    Ok(())
}
