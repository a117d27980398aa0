//! Generators for test and benchmark inputs.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::DataGraph;
use crate::query::QueryGraph;

/// Erdős–Rényi graph: each pair independently with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> DataGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    DataGraph::from_edges(n, &edges)
}

/// Random connected query of treewidth at most 2 on `k` nodes: a random
/// 2-tree with random edges removed while the query stays connected.
pub fn random_tw2_query(k: usize, seed: u64) -> QueryGraph {
    assert!((1..=32).contains(&k));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    if k >= 2 {
        edges.push((0, 1));
    }
    for x in 2..k {
        let (a, b) = edges[rng.gen_range(0..edges.len())];
        edges.push((a, x));
        edges.push((b, x));
    }
    edges.shuffle(&mut rng);
    let mut i = 0;
    while i < edges.len() {
        if rng.gen_bool(0.5) {
            let e = edges.remove(i);
            if QueryGraph::new(k, &edges).is_ok() {
                continue;
            }
            edges.insert(i, e);
        }
        i += 1;
    }
    QueryGraph::new(k, &edges).expect("connected by construction")
}

fn edge_index(n: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            out.push((u, v));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    fn rec(cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i as u32);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn connected(n: usize, pairs: &[(u32, u32)], mask: u32) -> bool {
    let mut adj = vec![0u32; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if mask & (1 << i) != 0 {
            adj[u as usize] |= 1 << v;
            adj[v as usize] |= 1 << u;
        }
    }
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let a = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[a] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen.count_ones() as usize == n
}

/// One representative of every connected simple graph on `n` vertices, up
/// to isomorphism. Representatives are the edge sets with the smallest
/// bitmask in their isomorphism class. Practical for `n <= 6`.
pub fn connected_graphs(n: usize) -> Vec<DataGraph> {
    assert!((1..=7).contains(&n), "exhaustive enumeration is limited to n <= 7");
    let pairs = edge_index(n);
    let mut pos = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        pos[u as usize][v as usize] = i;
        pos[v as usize][u as usize] = i;
    }
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        if !connected(n, &pairs, mask) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &(u, v))| 1u32 << pos[p[u as usize] as usize][p[v as usize] as usize])
                    .sum::<u32>()
            })
            .min()
            .expect("at least one permutation");
        if seen.insert(canon) {
            let edges: Vec<_> =
                pairs.iter().enumerate().filter(|&(i, _)| canon & (1 << i) != 0).map(|(_, &e)| e).collect();
            out.push(DataGraph::from_edges(n, &edges));
        }
    }
    out
}
