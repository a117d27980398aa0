//! Cross-checks both engines against the brute-force oracle on random
//! treewidth-2 queries.
//!
//! cargo run --release --example oracle_check

use tw2count::engine::{count_colorful, EngineKind};
use tw2count::fixtures::{gnp, random_tw2_query};
use tw2count::graph::random_coloring;
use tw2count::oracle::{brute_colorful, OracleBudget};
use tw2count::planner::enumerate_trees;

fn main() -> tw2count::Result<()> {
    for seed in 0..10 {
        let q = random_tw2_query(4 + seed as usize % 4, seed);
        let g = gnp(14, 0.4, seed);
        let chi = random_coloring(&g, q.k(), seed)?;
        let expected = brute_colorful(&g, &q, &chi, OracleBudget::default())?;
        let trees = enumerate_trees(&q)?;
        let mut agree = true;
        for tree in &trees {
            for kind in [EngineKind::Ps, EngineKind::Db] {
                agree &= count_colorful(&g, &chi, tree, kind)? == expected;
            }
        }
        println!(
            "query {} ({} trees): oracle {expected}, engines {}",
            q.to_file_format().replace('\n', " "),
            trees.len(),
            if agree { "agree" } else { "DISAGREE" }
        );
    }
    Ok(())
}
