//! Multi-trial color-coding estimate of 5-cycle matches compared with the
//! exact match count.
//!
//! cargo run --release --example estimate_matches

use tw2count::engine::EngineKind;
use tw2count::estimator::{estimate, EstimateOptions};
use tw2count::fixtures::gnp;
use tw2count::oracle::{brute_matches, OracleBudget};
use tw2count::planner::plan_query;
use tw2count::query::QueryGraph;

fn main() -> tw2count::Result<()> {
    let g = gnp(40, 0.15, 3);
    let q = QueryGraph::cycle(5);
    let tree = plan_query(&q)?;
    let exact = brute_matches(&g, &q, OracleBudget::default())?;
    for trials in [10, 100, 1000] {
        let r = estimate(&g, &tree, EngineKind::Db, EstimateOptions::new(trials, 1))?;
        println!(
            "{trials:>5} trials: mean {:>10.1}  exact {exact}  error {:>6.2}%  cv {:.3}",
            r.mean_estimate,
            100.0 * (r.mean_estimate - exact as f64) / exact as f64,
            r.cv
        );
    }
    Ok(())
}
