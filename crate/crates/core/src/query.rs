//! Small connected query graphs stored as per-node adjacency bitmasks.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::MAX_COLORS;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QueryGraph {
    adj: Vec<u32>,
}

impl QueryGraph {
    /// Builds a query on nodes `0..k`. Rejects self-loops, repeated edges,
    /// out-of-range nodes and disconnected queries.
    pub fn new(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if k == 0 || k > MAX_COLORS {
            return Err(Error::InvalidQuery(format!("node count {k} outside 1..=32")));
        }
        let mut adj = vec![0u32; k];
        for &(a, b) in edges {
            if a >= k || b >= k {
                return Err(Error::InvalidQuery(format!("edge ({a},{b}) out of range for k={k}")));
            }
            if a == b {
                return Err(Error::InvalidQuery(format!("self-loop on node {a}")));
            }
            if adj[a] & (1 << b) != 0 {
                return Err(Error::InvalidQuery(format!("repeated edge ({a},{b})")));
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        let q = QueryGraph { adj };
        if !q.is_connected() {
            return Err(Error::InvalidQuery("query is not connected".into()));
        }
        Ok(q)
    }

    /// Parses the query file format: first line `k`, then one `u v` pair per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first_line, header) =
            lines.next().ok_or(Error::Parse { line: 1, message: "missing node count".into() })?;
        let k: usize = header
            .parse()
            .map_err(|_| Error::Parse { line: first_line, message: format!("malformed node count {header:?}") })?;
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Parse { line: lineno, message: "expected `u v`".into() });
            }
            let parse = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse { line: lineno, message: format!("malformed node id {t:?}") })
            };
            edges.push((parse(toks[0])?, parse(toks[1])?));
        }
        QueryGraph::new(k, &edges)
    }

    pub fn to_file_format(&self) -> String {
        let mut out = format!("{}\n", self.k());
        for (a, b) in self.edges() {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn k(&self) -> usize {
        self.adj.len()
    }

    pub fn all_nodes(&self) -> u32 {
        if self.k() == 32 {
            u32::MAX
        } else {
            (1u32 << self.k()) - 1
        }
    }

    pub fn neighbor_mask(&self, a: usize) -> u32 {
        self.adj[a]
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].count_ones() as usize
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] & (1 << b) != 0
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.k() {
            for b in a + 1..self.k() {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    fn is_connected(&self) -> bool {
        let mut seen = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 {
            let a = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.adj[a] & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen == self.all_nodes()
    }

    pub fn cycle(len: usize) -> Self {
        let edges: Vec<_> = (0..len).map(|i| (i, (i + 1) % len)).collect();
        QueryGraph::new(len, &edges).expect("cycle of length >= 3")
    }

    pub fn path(k: usize) -> Self {
        let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        QueryGraph::new(k, &edges).expect("path")
    }

    /// Star with node 0 at the center and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        QueryGraph::new(leaves + 1, &edges).expect("star")
    }

    /// The eleven-node `sat` query. Nodes `a..=k` are ids `0..=10`.
    pub fn sat() -> Self {
        let id = |c: char| (c as u8 - b'a') as usize;
        let edges: Vec<(usize, usize)> = [
            ('a', 'b'),
            ('b', 'c'),
            ('c', 'd'),
            ('d', 'e'),
            ('e', 'a'),
            ('a', 'f'),
            ('f', 'g'),
            ('g', 'c'),
            ('f', 'h'),
            ('i', 'f'),
            ('i', 'g'),
            ('i', 'j'),
            ('j', 'k'),
            ('k', 'i'),
        ]
        .iter()
        .map(|&(x, y)| (id(x), id(y)))
        .collect();
        QueryGraph::new(11, &edges).expect("sat query")
    }

    /// A 4-cycle and a 6-cycle sharing one edge (`0-1`).
    pub fn brain1() -> Self {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (1, 4), (4, 5), (5, 6), (6, 7), (7, 0)];
        QueryGraph::new(8, &edges).expect("brain1 query")
    }
}

impl fmt::Display for QueryGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} edges=[", self.k())?;
        for (i, (a, b)) in self.edges().into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}-{b}")?;
        }
        write!(f, "]")
    }
}

/// Letter name used for `sat`-style fixtures (`0 -> a`).
pub fn letter(node: usize) -> char {
    (b'a' + node as u8) as char
}
