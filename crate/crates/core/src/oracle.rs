//! Brute-force match enumeration for small instances.

use crate::error::{Error, Result};
use crate::graph::{Coloring, DataGraph};
use crate::query::QueryGraph;
use crate::table::{EntryKey, ProjectionTable, Signature, NO_VERTEX};

/// Maximum number of partial mappings the oracle tries before giving up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget(u64);

impl OracleBudget {
    pub const DEFAULT: u64 = 1_000_000_000;
    pub const ENV_VAR: &'static str = "MOTIF_BUDGET";

    pub fn new(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidArgument("oracle budget must be positive".into()));
        }
        Ok(OracleBudget(limit))
    }

    /// Reads `MOTIF_BUDGET`, falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(v) => {
                let limit = v.trim().parse().map_err(|_| {
                    Error::InvalidArgument(format!("{} is not a positive integer: {v:?}", Self::ENV_VAR))
                })?;
                Self::new(limit)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn limit(self) -> u64 {
        self.0
    }
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget(Self::DEFAULT)
    }
}

/// Query nodes of `mask` in DFS order from the smallest node, each node
/// (after the first) paired with an already placed neighbor.
fn search_order(q: &QueryGraph, mask: u32) -> Vec<(usize, Option<usize>)> {
    let mut order = Vec::new();
    let mut placed = 0u32;
    let mut remaining = mask;
    while remaining != 0 {
        let start = remaining.trailing_zeros() as usize;
        let mut stack = vec![(start, None)];
        while let Some((a, via)) = stack.pop() {
            if placed & (1 << a) != 0 {
                continue;
            }
            placed |= 1 << a;
            remaining &= !(1 << a);
            order.push((a, via));
            let mut nbrs = q.neighbor_mask(a) & mask & !placed;
            let mut next = Vec::new();
            while nbrs != 0 {
                let b = nbrs.trailing_zeros() as usize;
                nbrs &= nbrs - 1;
                next.push((b, Some(a)));
            }
            stack.extend(next.into_iter().rev());
        }
    }
    order
}

struct Search<'a, F> {
    g: &'a DataGraph,
    q: &'a QueryGraph,
    mask: u32,
    chi: Option<&'a Coloring>,
    order: Vec<(usize, Option<usize>)>,
    image: Vec<u32>,
    used: Vec<bool>,
    explored: u64,
    budget: u64,
    visit: F,
}

impl<F: FnMut(&[u32], Signature) -> Result<()>> Search<'_, F> {
    fn run(&mut self) -> Result<()> {
        self.step(0, Signature::EMPTY)
    }

    fn step(&mut self, depth: usize, sig: Signature) -> Result<()> {
        if depth == self.order.len() {
            return (self.visit)(&self.image, sig);
        }
        let (a, via) = self.order[depth];
        let candidates: Vec<u32> = match via {
            Some(p) => self.g.neighbors(self.image[p]).to_vec(),
            None => (0..self.g.n() as u32).collect(),
        };
        let placed_nbrs: Vec<usize> = self.order[..depth]
            .iter()
            .map(|&(b, _)| b)
            .filter(|&b| self.q.has_edge(a, b) && self.mask & (1 << b) != 0)
            .collect();
        for v in candidates {
            self.explored += 1;
            if self.explored > self.budget {
                return Err(Error::Budget { budget: self.budget, explored: self.explored - 1 });
            }
            if self.used[v as usize] {
                continue;
            }
            let next_sig = match self.chi {
                Some(chi) => {
                    let c = chi.color(v);
                    if sig.contains(c) {
                        continue;
                    }
                    sig.with(c)
                }
                None => sig,
            };
            if !placed_nbrs.iter().all(|&b| self.g.has_edge(self.image[b], v)) {
                continue;
            }
            self.image[a] = v;
            self.used[v as usize] = true;
            self.step(depth + 1, next_sig)?;
            self.used[v as usize] = false;
        }
        self.image[a] = NO_VERTEX;
        Ok(())
    }
}

fn enumerate<F: FnMut(&[u32], Signature) -> Result<()>>(
    g: &DataGraph,
    q: &QueryGraph,
    mask: u32,
    chi: Option<&Coloring>,
    budget: OracleBudget,
    visit: F,
) -> Result<()> {
    let mut s = Search {
        g,
        q,
        mask,
        chi,
        order: search_order(q, mask),
        image: vec![NO_VERTEX; q.k()],
        used: vec![false; g.n()],
        explored: 0,
        budget: budget.limit(),
        visit,
    };
    s.run()
}

fn checked_inc(count: &mut u64) -> Result<()> {
    *count = count.checked_add(1).ok_or(Error::Overflow("oracle count"))?;
    Ok(())
}

/// Number of injective edge-preserving maps from the query into `g`.
pub fn brute_matches(g: &DataGraph, q: &QueryGraph, budget: OracleBudget) -> Result<u64> {
    let mut count = 0u64;
    enumerate(g, q, q.all_nodes(), None, budget, |_, _| checked_inc(&mut count))?;
    Ok(count)
}

/// Number of matches whose images carry pairwise distinct colors.
pub fn brute_colorful(g: &DataGraph, q: &QueryGraph, chi: &Coloring, budget: OracleBudget) -> Result<u64> {
    let mut count = 0u64;
    enumerate(g, q, q.all_nodes(), Some(chi), budget, |_, _| checked_inc(&mut count))?;
    Ok(count)
}

/// Projection table of the subquery induced by `nodes` (a bitmask of query
/// nodes): colorful matches grouped by the images of `boundary` (0 to 2
/// nodes, in key order) and their color set.
pub fn brute_projection(
    g: &DataGraph,
    q: &QueryGraph,
    nodes: u32,
    chi: &Coloring,
    boundary: &[usize],
    budget: OracleBudget,
) -> Result<ProjectionTable> {
    if boundary.len() > 2 {
        return Err(Error::InvalidArgument("at most two boundary nodes".into()));
    }
    if nodes == 0 || nodes & !q.all_nodes() != 0 || boundary.iter().any(|&a| nodes & (1 << a) == 0) {
        return Err(Error::InvalidArgument("boundary and subquery nodes must lie in the query".into()));
    }
    let mut table = ProjectionTable::new(boundary.len(), Vec::new());
    table.meta.boundary = boundary.to_vec();
    enumerate(g, q, nodes, Some(chi), budget, |image, sig| {
        let mut verts = [NO_VERTEX; 2];
        for (i, &a) in boundary.iter().enumerate() {
            verts[i] = image[a];
        }
        table.add(EntryKey { verts, slots: [NO_VERTEX; 2], sig }, 1)
    })?;
    Ok(table)
}

/// Number of distinct subgraphs of `g` isomorphic to the query, found by
/// collecting the edge sets of all matches. Tests only.
pub fn distinct_subgraphs(g: &DataGraph, q: &QueryGraph, budget: OracleBudget) -> Result<u64> {
    let edges = q.edges();
    let mut seen = std::collections::HashSet::new();
    enumerate(g, q, q.all_nodes(), None, budget, |image, _| {
        let mut img: Vec<(u32, u32)> =
            edges.iter().map(|&(a, b)| (image[a].min(image[b]), image[a].max(image[b]))).collect();
        img.sort_unstable();
        seen.insert(img);
        Ok(())
    })?;
    Ok(seen.len() as u64)
}
