//! Builds the projection tables of a small query block by block and dumps
//! them. Each line is `u v [x [y]] signature-mask count`.
//!
//! cargo run --example projection_tables

use tw2count::engine::{block_tables, EngineKind};
use tw2count::graph::{random_coloring, DataGraph};
use tw2count::planner::plan_query;
use tw2count::query::QueryGraph;

fn main() -> tw2count::Result<()> {
    // Two triangles sharing an edge, plus a pendant vertex.
    let g = DataGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (1, 3), (3, 2), (3, 4)]);
    // A 4-cycle with a pendant edge.
    let q = QueryGraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)])?;
    let tree = plan_query(&q)?;
    let chi = random_coloring(&g, 5, 1)?;
    println!("plan {}", tree.canonical());
    println!("colors {:?}", chi.as_slice());
    for (id, table) in block_tables(&g, &chi, &tree, EngineKind::Db)?.iter().enumerate() {
        let b = tree.block(id);
        println!("\nblock {id} {:?} nodes {:?} boundary {:?}: {} entries", b.kind, b.nodes, b.boundary, table.len());
        print!("{}", table.dump());
    }
    Ok(())
}
