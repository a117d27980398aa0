use proptest::prelude::*;

use tw2count::engine::{block_tables, count_colorful, db_split, Engine, EngineKind, HalfPathSpec, SolvedBlocks};
use tw2count::fixtures::{gnp, random_tw2_query};
use tw2count::graph::{degree_rank, random_coloring, Coloring, DataGraph};
use tw2count::oracle::{brute_colorful, brute_projection, OracleBudget};
use tw2count::planner::{enumerate_trees, plan_query, BlockKind, DecompositionTree};
use tw2count::query::QueryGraph;
use tw2count::table::{Joiner, ProjectionTable};

const ENGINES: [EngineKind; 2] = [EngineKind::Ps, EngineKind::Db];

fn cyclic_coloring(n: usize, k: usize) -> Coloring {
    Coloring::new((0..n).map(|v| (v % k) as u8 + 1).collect(), k).unwrap()
}

/// Returns the number of non-empty block tables compared.
fn assert_tables_match_oracle(g: &DataGraph, chi: &Coloring, tree: &DecompositionTree) -> usize {
    let q = tree.query();
    let mut nonempty = 0;
    for kind in ENGINES {
        let tables = block_tables(g, chi, tree, kind).unwrap();
        for (id, t) in tables.iter().enumerate() {
            let boundary = &t.meta.boundary;
            let oracle =
                brute_projection(g, q, tree.subquery_nodes(id), chi, boundary, OracleBudget::default()).unwrap();
            assert_eq!(t, &oracle, "{kind} block {id} of {} on {}", tree.canonical(), q);
            nonempty += !t.is_empty() as usize;
        }
    }
    nonempty
}

#[test]
fn sat_every_tree_matches_oracle() {
    let q = QueryGraph::sat();
    let trees = enumerate_trees(&q).unwrap();
    let mut nonzero = 0;
    for seed in 0..3 {
        let g = gnp(12, 0.6, seed);
        let chi = cyclic_coloring(12, 11);
        let expected = brute_colorful(&g, &q, &chi, OracleBudget::default()).unwrap();
        nonzero += (expected > 0) as usize;
        for tree in &trees {
            for kind in ENGINES {
                assert_eq!(count_colorful(&g, &chi, tree, kind).unwrap(), expected, "{}", tree.canonical());
            }
        }
    }
    assert_eq!(nonzero, 3);
}

#[test]
fn block_tables_equal_oracle_projections() {
    let mut queries = vec![QueryGraph::sat(), QueryGraph::brain1(), QueryGraph::cycle(5), QueryGraph::star(3)];
    queries.extend((0..12).map(|s| random_tw2_query(3 + s as usize % 5, 100 + s)));
    let (mut compared, mut nonempty) = (0, 0);
    for (i, q) in queries.iter().enumerate() {
        let n = if q.k() > 8 { 9 } else { 8 };
        let g = gnp(n, 0.55, i as u64);
        let chi = random_coloring(&g, q.k(), 7 + i as u64).unwrap();
        for tree in enumerate_trees(q).unwrap().iter().take(6) {
            compared += 2 * tree.blocks().len();
            nonempty += assert_tables_match_oracle(&g, &chi, tree);
        }
    }
    assert!(nonempty * 2 > compared, "{nonempty} of {compared} tables non-empty");
}

#[test]
fn leaf_with_annotated_leaf_node_multiplies() {
    // A triangle hanging off a pendant edge: the leaf node carries the cycle.
    let q = QueryGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 1)]).unwrap();
    let g = gnp(6, 0.7, 3);
    let chi = random_coloring(&g, 4, 11).unwrap();
    for tree in enumerate_trees(&q).unwrap() {
        assert!(assert_tables_match_oracle(&g, &chi, &tree) > 0);
    }
}

#[test]
fn per_h_tables_partition_the_ps_table() {
    for seed in 0..10 {
        let q = random_tw2_query(5 + seed as usize % 3, seed);
        let g = gnp(10, 0.5, seed);
        let chi = random_coloring(&g, q.k(), seed).unwrap();
        let order = degree_rank(&g);
        let tree = plan_query(&q).unwrap();
        let ps = block_tables(&g, &chi, &tree, EngineKind::Ps).unwrap();
        let mut engine = Engine::new(Joiner::new(&g, &chi, &order), EngineKind::Db);
        let solved = engine.solve_tree(&tree).unwrap();
        for id in tree.post_order() {
            let block = tree.block(id);
            if block.kind != BlockKind::Cycle {
                continue;
            }
            let mut sum = ProjectionTable::new(block.boundary.len(), Vec::new());
            for t in engine.db_tables_per_h(block, &solved).unwrap() {
                sum.absorb(&t).unwrap();
            }
            assert_eq!(sum, ps[id]);
        }
    }
}

#[test]
fn transposed_boundary_order_gives_transposed_table() {
    for seed in 0..10 {
        let q = random_tw2_query(6, 40 + seed);
        let g = gnp(9, 0.5, seed);
        let chi = random_coloring(&g, 6, seed).unwrap();
        let order = degree_rank(&g);
        let tree = plan_query(&q).unwrap();
        for kind in ENGINES {
            let mut engine = Engine::new(Joiner::new(&g, &chi, &order), kind);
            let solved = engine.solve_tree(&tree).unwrap();
            for block in tree.blocks() {
                if block.kind == BlockKind::Cycle && block.boundary.len() == 2 {
                    let mut flipped = block.clone();
                    flipped.boundary.reverse();
                    let t = engine.solve_cycle(&flipped, &solved).unwrap();
                    assert_eq!(t, solved.get(block.id).unwrap().table.transpose().unwrap());
                }
            }
        }
    }
}

#[test]
fn capped_half_tables_are_subsets_of_uncapped() {
    for seed in 0..10 {
        let q = random_tw2_query(6, 70 + seed);
        let g = gnp(10, 0.5, seed);
        let chi = random_coloring(&g, 6, seed).unwrap();
        let order = degree_rank(&g);
        let tree = plan_query(&q).unwrap();
        let mut engine = Engine::new(Joiner::new(&g, &chi, &order), EngineKind::Db);
        let solved: SolvedBlocks<ProjectionTable> = engine.solve_tree(&tree).unwrap();
        for block in tree.blocks().iter().filter(|b| b.kind == BlockKind::Cycle) {
            for h in 0..block.len() {
                let (h, d) = db_split(block, h);
                for (capped, open) in [
                    (HalfPathSpec::plus(h, d, true), HalfPathSpec::plus(h, d, false)),
                    (HalfPathSpec::minus(h, d, true), HalfPathSpec::minus(h, d, false)),
                ] {
                    let c = engine.half_path(block, &capped, &solved).unwrap();
                    let o = engine.half_path(block, &open, &solved).unwrap();
                    for (k, v) in c.iter() {
                        assert!(v <= o.get(k), "capped entry {k:?} exceeds uncapped");
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engines_agree_with_oracle(n in 4usize..=30, k in 2usize..=8, qseed in 0u64..10_000, gseed in 0u64..10_000) {
        let q = random_tw2_query(k, qseed);
        let p = if n > 16 { 0.25 } else { 0.5 };
        let g = gnp(n, p, gseed);
        let chi = random_coloring(&g, k, gseed ^ qseed).unwrap();
        let expected = brute_colorful(&g, &q, &chi, OracleBudget::default()).unwrap();
        for tree in enumerate_trees(&q).unwrap().iter().take(4) {
            for kind in ENGINES {
                prop_assert_eq!(count_colorful(&g, &chi, tree, kind).unwrap(), expected);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn count_is_plan_invariant(k in 3usize..=9, qseed in 0u64..10_000, gseed in 0u64..10_000) {
        let q = random_tw2_query(k, qseed);
        let g = gnp(60, 0.15, gseed);
        let chi = random_coloring(&g, k, gseed).unwrap();
        let trees = enumerate_trees(&q).unwrap();
        let expected = count_colorful(&g, &chi, &trees[0], EngineKind::Db).unwrap();
        for tree in trees.iter().take(12) {
            for kind in ENGINES {
                prop_assert_eq!(count_colorful(&g, &chi, tree, kind).unwrap(), expected, "{}", tree.canonical());
            }
        }
    }
}
