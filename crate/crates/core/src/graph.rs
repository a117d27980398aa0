//! Undirected data graphs, the degree-based vertex order, and random colorings.
//!
//! Graphs are stored in compressed sparse row form with sorted neighbor
//! lists. Vertex ids are dense and 0-based; [`load_edge_list_compact`] keeps
//! a remap table when the input ids are sparse.

use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest color count a [`Signature`](crate::table::Signature) word can hold.
pub const MAX_COLORS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    m: usize,
    original_ids: Option<Vec<u64>>,
    dropped_self_loops: usize,
    dropped_duplicates: usize,
}

impl DataGraph {
    /// Builds a simple graph on `n` vertices. Self-loops and repeated edges
    /// (in either orientation) are dropped and tallied.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(edges.len() * 2);
        let mut self_loops = 0;
        for &(u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge ({u},{v}) out of range for n={n}");
            if u == v {
                self_loops += 1;
                continue;
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        let duplicates = (before - pairs.len()) / 2;

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors: Vec<u32> = pairs.iter().map(|&(_, v)| v).collect();
        let m = neighbors.len() / 2;
        DataGraph {
            offsets,
            neighbors,
            m,
            original_ids: None,
            dropped_self_loops: self_loops,
            dropped_duplicates: duplicates,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n() as u32).flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n() as u32).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Original input id of a dense vertex, when the graph was loaded with remapping.
    pub fn original_id(&self, v: u32) -> u64 {
        match &self.original_ids {
            Some(ids) => ids[v as usize],
            None => v as u64,
        }
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    pub fn dropped_duplicates(&self) -> usize {
        self.dropped_duplicates
    }

    /// Serializes as one `u v` line per undirected edge (`u < v`).
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.m * 12);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        DataGraph::from_edges(n, &edges)
    }
}

fn parse_pairs<R: BufRead>(reader: R) -> Result<Vec<(u64, u64)>> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse { line: lineno, message: "expected two vertex ids".into() })?;
            tok.parse::<u64>()
                .map_err(|_| Error::Parse { line: lineno, message: format!("malformed vertex id {tok:?}") })
        };
        let u = next_id()?;
        let v = next_id()?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse { line: lineno, message: format!("unexpected token {extra:?}") });
        }
        pairs.push((u, v));
    }
    Ok(pairs)
}

/// Reads whitespace-separated `u v` lines. Blank lines and lines starting
/// with `#` or `%` are skipped. The vertex count is `max id + 1`; vertices
/// that never appear stay in the graph with degree zero.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<DataGraph> {
    let pairs = parse_pairs(reader)?;
    let n = pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    if n > u32::MAX as u64 {
        return Err(Error::Parse { line: 0, message: format!("vertex id {} exceeds 32 bits", n - 1) });
    }
    let edges: Vec<(u32, u32)> = pairs.iter().map(|&(u, v)| (u as u32, v as u32)).collect();
    Ok(DataGraph::from_edges(n as usize, &edges))
}

/// Like [`load_edge_list`], but renumbers the ids that occur to `0..n` in
/// increasing order and keeps the original ids.
pub fn load_edge_list_compact<R: BufRead>(reader: R) -> Result<DataGraph> {
    let pairs = parse_pairs(reader)?;
    let mut ids: Vec<u64> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let dense = |x: u64| ids.binary_search(&x).expect("id collected above") as u32;
    let edges: Vec<(u32, u32)> = pairs.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
    let mut g = DataGraph::from_edges(ids.len(), &edges);
    g.original_ids = Some(ids);
    Ok(g)
}

pub fn parse_edge_list(text: &str) -> Result<DataGraph> {
    load_edge_list(text.as_bytes())
}

/// Total order on vertices by `(degree, id)`. `higher(u, v)` is `u ≻ v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrdering {
    rank: Vec<u32>,
    by_rank: Vec<u32>,
}

impl VertexOrdering {
    pub fn rank(&self, v: u32) -> u32 {
        self.rank[v as usize]
    }

    #[inline]
    pub fn higher(&self, u: u32, v: u32) -> bool {
        self.rank[u as usize] > self.rank[v as usize]
    }

    /// Vertex holding the given rank.
    pub fn vertex_at(&self, rank: u32) -> u32 {
        self.by_rank[rank as usize]
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    /// Ordering from an explicit sort key per vertex; ties broken by id.
    pub fn from_keys<K: Ord + Copy>(keys: &[K]) -> Self {
        let mut by_rank: Vec<u32> = (0..keys.len() as u32).collect();
        by_rank.sort_by_key(|&v| (keys[v as usize], v));
        let mut rank = vec![0u32; keys.len()];
        for (r, &v) in by_rank.iter().enumerate() {
            rank[v as usize] = r as u32;
        }
        VertexOrdering { rank, by_rank }
    }
}

/// Ranks vertices by ascending degree; equal degrees place the least id first.
pub fn degree_rank(g: &DataGraph) -> VertexOrdering {
    let degrees: Vec<usize> = (0..g.n() as u32).map(|v| g.degree(v)).collect();
    VertexOrdering::from_keys(&degrees)
}

/// Assignment of a color in `1..=k` to every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<u8>,
    k: usize,
}

impl Coloring {
    pub fn new(colors: Vec<u8>, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_COLORS {
            return Err(Error::UnsupportedColors(k));
        }
        if let Some(&c) = colors.iter().find(|&&c| c == 0 || c as usize > k) {
            return Err(Error::InvalidArgument(format!("color {c} outside 1..={k}")));
        }
        Ok(Coloring { colors, k })
    }

    #[inline]
    pub fn color(&self, v: u32) -> u8 {
        self.colors[v as usize]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.colors
    }
}

/// Colors every vertex independently and uniformly from `1..=k`.
pub fn random_coloring(g: &DataGraph, k: usize, seed: u64) -> Result<Coloring> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    coloring_from_rng(g.n(), k, &mut rng)
}

pub(crate) fn coloring_from_rng<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Coloring> {
    if k == 0 || k > MAX_COLORS {
        return Err(Error::UnsupportedColors(k));
    }
    let colors = (0..n).map(|_| rng.gen_range(1..=k as u8)).collect();
    Ok(Coloring { colors, k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn path_graph_loads() {
        let g = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn duplicates_and_self_loops_dropped() {
        let g = parse_edge_list("0 1\n1 0\n0 0").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.m(), 1);
        assert_eq!(g.dropped_self_loops(), 1);
        assert_eq!(g.dropped_duplicates(), 1);
    }

    #[test]
    fn malformed_token_reports_line() {
        let err = parse_edge_list("0 1\n# note\n2 x\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list("0 1 2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("7"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("-1 2"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn compact_loading_keeps_original_ids() {
        let g = load_edge_list_compact("10 500\n500 7\n".as_bytes()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.original_id(0), 7);
        assert_eq!(g.original_id(2), 500);
        assert!(g.has_edge(1, 2));
    }

    #[test]
    fn degree_rank_examples() {
        let star = DataGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let o = degree_rank(&star);
        assert_eq!(o.rank(0), 3);
        assert_eq!(o.rank(1), 0);

        let tri = DataGraph::complete(3);
        let o = degree_rank(&tri);
        assert!(o.higher(2, 1) && o.higher(1, 0));

        let path = DataGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let o = degree_rank(&path);
        assert_eq!((0..3).map(|r| o.vertex_at(r)).collect::<Vec<_>>(), vec![0, 2, 1]);
    }

    #[test]
    fn coloring_contract() {
        let g = DataGraph::complete(5);
        let c = random_coloring(&g, 1, 9).unwrap();
        assert!(c.as_slice().iter().all(|&x| x == 1));
        assert_eq!(random_coloring(&g, 4, 3).unwrap(), random_coloring(&g, 4, 3).unwrap());
        assert!(matches!(random_coloring(&g, 33, 0), Err(Error::UnsupportedColors(33))));
        assert!(matches!(random_coloring(&g, 0, 0), Err(Error::UnsupportedColors(0))));
    }

    #[test]
    fn coloring_frequencies_concentrate() {
        let n = 100_000usize;
        let g = DataGraph::from_edges(n, &[]);
        let c = random_coloring(&g, 3, 2024).unwrap();
        let mut freq = [0usize; 4];
        for &x in c.as_slice() {
            freq[x as usize] += 1;
        }
        let mean = n as f64 / 3.0;
        let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for f in &freq[1..] {
            assert!((*f as f64 - mean).abs() <= 5.0 * sigma, "frequency {f} vs {mean}");
        }
    }

    fn arb_edges() -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
        (1usize..30).prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n as u32, 0..n as u32), 0..80)))
    }

    proptest! {
        #[test]
        fn graph_invariants((n, edges) in arb_edges()) {
            let g = DataGraph::from_edges(n, &edges);
            let mut degree_sum = 0;
            for u in 0..n as u32 {
                let nb = g.neighbors(u);
                prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(!nb.contains(&u));
                for &v in nb {
                    prop_assert!(g.has_edge(v, u));
                }
                degree_sum += g.degree(u);
            }
            prop_assert_eq!(degree_sum, 2 * g.m());
        }

        #[test]
        fn ordering_is_a_total_permutation((n, edges) in arb_edges()) {
            let g = DataGraph::from_edges(n, &edges);
            let o = degree_rank(&g);
            let mut ranks: Vec<u32> = (0..n as u32).map(|v| o.rank(v)).collect();
            ranks.sort_unstable();
            prop_assert_eq!(ranks, (0..n as u32).collect::<Vec<_>>());
            for u in 0..n as u32 {
                for v in 0..n as u32 {
                    if u != v {
                        prop_assert!(o.higher(u, v) ^ o.higher(v, u));
                        let lex = (g.degree(u), u) > (g.degree(v), v);
                        prop_assert_eq!(o.higher(u, v), lex);
                    }
                }
            }
        }

        #[test]
        fn reserialization_is_idempotent((n, edges) in arb_edges()) {
            let text: String = edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
            let once = parse_edge_list(&text).unwrap();
            let twice = parse_edge_list(&once.to_edge_list()).unwrap();
            prop_assert_eq!(once.m(), twice.m());
            prop_assert_eq!(once.edges().collect::<Vec<_>>(), twice.edges().collect::<Vec<_>>());
            let _ = n;
        }
    }
}
