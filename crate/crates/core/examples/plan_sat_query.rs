//! Enumerates every decomposition tree of the eleven-node `sat` query and
//! prints them with their scores; the first line is the selected plan.
//!
//! cargo run --example plan_sat_query

use tw2count::planner::{enumerate_trees, select_plan};
use tw2count::query::{letter, QueryGraph};

fn main() -> tw2count::Result<()> {
    let q = QueryGraph::sat();
    let trees = enumerate_trees(&q)?;
    let selected = select_plan(trees.clone())?;
    println!("selected {:?} {}", selected.score(), selected.canonical());
    for tree in &trees {
        println!("{:?} {}", tree.score(), tree.canonical());
    }
    println!("\nselected plan, bottom-up:");
    for id in selected.post_order() {
        let b = selected.block(id);
        let names = |xs: &[usize]| xs.iter().map(|&x| letter(x)).collect::<String>();
        println!(
            "  {:?} ({}) boundary [{}] parent {:?}",
            b.kind,
            names(&b.nodes),
            names(&b.boundary),
            selected.parent(id)
        );
    }
    Ok(())
}
