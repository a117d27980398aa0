//! Query decomposition into leaf-edge and cycle blocks.
//!
//! A [`ContractionState`] is a residual query together with the annotations
//! left behind by earlier contractions. Each step picks a block (a leaf edge,
//! or an induced cycle with at most two boundary nodes), removes it, and
//! records the removed structure as an annotation on the surviving boundary
//! node or on a new edge between the two boundary nodes. Annotations swept up
//! by a later block become that block's children, which yields the
//! decomposition tree.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::query::QueryGraph;

pub type BlockId = usize;

/// Upper bound on distinct trees produced by [`enumerate_trees`].
pub const MAX_TREES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    LeafEdge,
    Cycle,
}

/// A block that can be contracted in the current residual query.
///
/// Cycle nodes start at the smallest node id and run towards its smaller
/// cycle neighbor. Leaf edges list `(boundary, leaf)`. Boundary nodes follow
/// the order of `nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockCandidate {
    pub kind: BlockKind,
    pub nodes: Vec<usize>,
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub id: BlockId,
    pub kind: BlockKind,
    pub nodes: Vec<usize>,
    pub boundary: Vec<usize>,
    /// `(position in nodes, child)`.
    pub child_on_node: Vec<(usize, BlockId)>,
    /// `(edge position, child)`; edge `i` joins `nodes[i]` and `nodes[i + 1]`
    /// (cyclically). An annotated edge stands for its child's subquery rather
    /// than an original query edge.
    pub child_on_edge: Vec<(usize, BlockId)>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        match self.kind {
            BlockKind::LeafEdge => 1,
            BlockKind::Cycle => self.nodes.len(),
        }
    }

    pub fn edge_nodes(&self, pos: usize) -> (usize, usize) {
        (self.nodes[pos], self.nodes[(pos + 1) % self.nodes.len()])
    }

    pub fn node_child(&self, pos: usize) -> Option<BlockId> {
        self.child_on_node.iter().find(|&&(p, _)| p == pos).map(|&(_, c)| c)
    }

    pub fn edge_child(&self, pos: usize) -> Option<BlockId> {
        self.child_on_edge.iter().find(|&&(p, _)| p == pos).map(|&(_, c)| c)
    }

    pub fn position(&self, node: usize) -> Option<usize> {
        self.nodes.iter().position(|&x| x == node)
    }

    pub fn children(&self) -> impl Iterator<Item = BlockId> + '_ {
        self.child_on_node.iter().chain(&self.child_on_edge).map(|&(_, c)| c)
    }
}

/// Residual query plus the blocks contracted so far.
#[derive(Debug, Clone)]
pub struct ContractionState {
    query: QueryGraph,
    alive: u32,
    adj: Vec<u32>,
    node_ann: Vec<Option<BlockId>>,
    edge_ann: BTreeMap<(usize, usize), BlockId>,
    blocks: Vec<Block>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

impl ContractionState {
    pub fn new(query: &QueryGraph) -> Self {
        let k = query.k();
        ContractionState {
            query: query.clone(),
            alive: query.all_nodes(),
            adj: (0..k).map(|a| query.neighbor_mask(a)).collect(),
            node_ann: vec![None; k],
            edge_ann: BTreeMap::new(),
            blocks: Vec::new(),
        }
    }

    pub fn alive_count(&self) -> usize {
        self.alive.count_ones() as usize
    }

    /// Contraction stops once at most one node remains.
    pub fn is_finished(&self) -> bool {
        self.alive_count() <= 1
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn node_annotation(&self, node: usize) -> Option<BlockId> {
        self.node_ann[node]
    }

    pub fn edge_annotation(&self, a: usize, b: usize) -> Option<BlockId> {
        self.edge_ann.get(&edge_key(a, b)).copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] & (1 << b) != 0
    }

    pub fn residual_description(&self) -> String {
        let mut s = String::from("nodes=[");
        for (i, a) in bits(self.alive).enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{a}");
        }
        s.push_str("] edges=[");
        let mut first = true;
        for a in bits(self.alive) {
            for b in bits(self.adj[a]).filter(|&b| b > a) {
                if !first {
                    s.push(' ');
                }
                first = false;
                let _ = write!(s, "{a}-{b}");
            }
        }
        s.push(']');
        s
    }

    /// Every leaf edge and every induced cycle with at most two boundary nodes.
    pub fn find_blocks(&self) -> Vec<BlockCandidate> {
        let mut out = Vec::new();
        for b in bits(self.alive) {
            if self.adj[b].count_ones() == 1 {
                let a = self.adj[b].trailing_zeros() as usize;
                let boundary = if self.adj[a].count_ones() > 1 { vec![a] } else { vec![] };
                out.push(BlockCandidate { kind: BlockKind::LeafEdge, nodes: vec![a, b], boundary });
            }
        }
        for cycle in self.induced_cycles() {
            let members: u32 = cycle.iter().map(|&a| 1u32 << a).sum();
            let boundary: Vec<usize> = cycle.iter().copied().filter(|&a| self.adj[a] & !members != 0).collect();
            if boundary.len() <= 2 {
                out.push(BlockCandidate { kind: BlockKind::Cycle, nodes: cycle, boundary });
            }
        }
        out
    }

    fn induced_cycles(&self) -> Vec<Vec<usize>> {
        let mut cycles = Vec::new();
        for s in bits(self.alive) {
            let mut path = vec![s];
            self.extend_induced(s, &mut path, &mut cycles);
        }
        cycles
    }

    // Grows induced paths from `start` through larger node ids; a cycle is
    // emitted when the new node's only earlier neighbor (besides the path
    // tail) is `start`.
    fn extend_induced(&self, start: usize, path: &mut Vec<usize>, cycles: &mut Vec<Vec<usize>>) {
        let last = *path.last().expect("non-empty path");
        let earlier: u32 = path[..path.len() - 1].iter().map(|&a| 1u32 << a).sum();
        let on_path = earlier | (1 << last);
        for x in bits(self.adj[last] & !on_path) {
            if x < start {
                continue;
            }
            let touch = self.adj[x] & earlier;
            if touch == 0 {
                path.push(x);
                self.extend_induced(start, path, cycles);
                path.pop();
            } else if touch == 1 << start && path.len() >= 2 && path[1] < x {
                let mut cycle = path.clone();
                cycle.push(x);
                cycles.push(cycle);
            }
        }
    }

    /// Contracts `cand`, which must be one of [`find_blocks`](Self::find_blocks).
    pub fn contract(&self, cand: &BlockCandidate) -> Result<ContractionState> {
        if !self.find_blocks().contains(cand) {
            return Err(Error::Contract(format!(
                "{:?} {:?} is not a block of residual {}",
                cand.kind,
                cand.nodes,
                self.residual_description()
            )));
        }
        let mut next = self.clone();
        let id = next.blocks.len();
        let mut child_on_node = Vec::new();
        let mut child_on_edge = Vec::new();
        for (pos, &a) in cand.nodes.iter().enumerate() {
            if let Some(c) = next.node_ann[a].take() {
                child_on_node.push((pos, c));
            }
        }
        let edge_positions = match cand.kind {
            BlockKind::LeafEdge => 1,
            BlockKind::Cycle => cand.nodes.len(),
        };
        for pos in 0..edge_positions {
            let a = cand.nodes[pos];
            let b = cand.nodes[(pos + 1) % cand.nodes.len()];
            if let Some(c) = next.edge_ann.remove(&edge_key(a, b)) {
                child_on_edge.push((pos, c));
            }
            next.adj[a] &= !(1 << b);
            next.adj[b] &= !(1 << a);
        }
        for &a in &cand.nodes {
            if !cand.boundary.contains(&a) {
                debug_assert_eq!(next.adj[a], 0, "interior node keeps outside edges");
                next.alive &= !(1 << a);
            }
        }
        match (cand.kind, cand.boundary.as_slice()) {
            (BlockKind::LeafEdge, _) => {
                let (a, b) = (cand.nodes[0], cand.nodes[1]);
                next.alive &= !(1 << b);
                next.alive |= 1 << a;
                next.node_ann[a] = Some(id);
            }
            (BlockKind::Cycle, []) => {}
            (BlockKind::Cycle, [a]) => next.node_ann[*a] = Some(id),
            (BlockKind::Cycle, [a, b]) => {
                next.adj[*a] |= 1 << b;
                next.adj[*b] |= 1 << a;
                next.edge_ann.insert(edge_key(*a, *b), id);
            }
            (BlockKind::Cycle, _) => unreachable!("find_blocks keeps at most two boundary nodes"),
        }
        next.blocks.push(Block {
            id,
            kind: cand.kind,
            nodes: cand.nodes.clone(),
            boundary: cand.boundary.clone(),
            child_on_node,
            child_on_edge,
        });
        Ok(next)
    }

    fn canonical_key(&self) -> String {
        let canon = |id: BlockId| canonical_block(&self.blocks, id);
        let mut s = format!("{:x}|", self.alive);
        for a in bits(self.alive) {
            for b in bits(self.adj[a]).filter(|&b| b > a) {
                let _ = write!(s, "{a}-{b}");
                if let Some(&c) = self.edge_ann.get(&(a, b)) {
                    let _ = write!(s, "={}", canon(c));
                }
                s.push(';');
            }
        }
        s.push('|');
        for a in bits(self.alive) {
            if let Some(c) = self.node_ann[a] {
                let _ = write!(s, "{a}={};", canon(c));
            }
        }
        s
    }

    pub fn into_tree(self) -> DecompositionTree {
        debug_assert!(self.is_finished());
        let mut parent = vec![None; self.blocks.len()];
        for b in &self.blocks {
            for c in b.children() {
                debug_assert!(parent[c].is_none(), "block {c} has two parents");
                parent[c] = Some(b.id);
            }
        }
        let root = self.blocks.len().checked_sub(1);
        debug_assert!(parent.iter().enumerate().all(|(i, p)| p.is_some() || Some(i) == root));
        DecompositionTree { query: self.query, blocks: self.blocks, root, parent }
    }
}

fn canonical_block(blocks: &[Block], id: BlockId) -> String {
    let b = &blocks[id];
    let mut parts: Vec<String> = Vec::new();
    for &(pos, c) in &b.child_on_node {
        parts.push(format!("n{}:{}", b.nodes[pos], canonical_block(blocks, c)));
    }
    for &(pos, c) in &b.child_on_edge {
        let (x, y) = b.edge_nodes(pos);
        parts.push(format!("e{}-{}:{}", x.min(y), x.max(y), canonical_block(blocks, c)));
    }
    parts.sort();
    let mut boundary = b.boundary.clone();
    boundary.sort_unstable();
    let kind = match b.kind {
        BlockKind::LeafEdge => 'L',
        BlockKind::Cycle => 'C',
    };
    format!("{kind}({:?}|{:?}){{{}}}", b.nodes, boundary, parts.join(";"))
}

/// Blocks of the unmodified query.
pub fn find_blocks(q: &QueryGraph) -> Vec<BlockCandidate> {
    ContractionState::new(q).find_blocks()
}

/// Heuristic plan cost; smaller is better, compared field by field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PlanScore {
    pub longest_cycle: usize,
    pub boundary_nodes: usize,
    pub annotations: usize,
}

#[derive(Debug, Clone)]
pub struct DecompositionTree {
    query: QueryGraph,
    blocks: Vec<Block>,
    root: Option<BlockId>,
    parent: Vec<Option<BlockId>>,
}

impl DecompositionTree {
    pub fn query(&self) -> &QueryGraph {
        &self.query
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id]
    }

    /// `None` only for the single-node query.
    pub fn root(&self) -> Option<BlockId> {
        self.root
    }

    pub fn parent(&self, id: BlockId) -> Option<BlockId> {
        self.parent[id]
    }

    /// Children before parents; the root comes last.
    pub fn post_order(&self) -> Vec<BlockId> {
        let mut order = Vec::with_capacity(self.blocks.len());
        if let Some(root) = self.root {
            self.post_order_from(root, &mut order);
        }
        order
    }

    fn post_order_from(&self, id: BlockId, out: &mut Vec<BlockId>) {
        for c in self.blocks[id].children() {
            self.post_order_from(c, out);
        }
        out.push(id);
    }

    /// Nodes of the subquery represented by a block: its own nodes and those
    /// of all descendants.
    pub fn subquery_nodes(&self, id: BlockId) -> u32 {
        let b = &self.blocks[id];
        let mut mask: u32 = b.nodes.iter().map(|&a| 1u32 << a).sum();
        for c in b.children() {
            mask |= self.subquery_nodes(c);
        }
        mask
    }

    pub fn score(&self) -> PlanScore {
        PlanScore {
            longest_cycle: self
                .blocks
                .iter()
                .filter(|b| b.kind == BlockKind::Cycle)
                .map(|b| b.nodes.len())
                .max()
                .unwrap_or(0),
            boundary_nodes: self.blocks.iter().map(|b| b.boundary.len()).sum(),
            annotations: self.blocks.iter().map(|b| b.child_on_node.len() + b.child_on_edge.len()).sum(),
        }
    }

    /// Serialization independent of block numbering and contraction order.
    pub fn canonical(&self) -> String {
        match self.root {
            Some(r) => canonical_block(&self.blocks, r),
            None => "single".to_string(),
        }
    }

    pub fn to_json(&self) -> TreeJson {
        let blocks = self
            .blocks
            .iter()
            .map(|b| BlockJson {
                id: b.id,
                kind: b.kind,
                nodes: b.nodes.clone(),
                boundary: b.boundary.clone(),
                parent: self.parent[b.id],
                node_children: b
                    .child_on_node
                    .iter()
                    .map(|&(pos, block)| NodeChild { node: b.nodes[pos], block })
                    .collect(),
                edge_children: b
                    .child_on_edge
                    .iter()
                    .map(|&(pos, block)| {
                        let (x, y) = b.edge_nodes(pos);
                        EdgeChild { edge: [x, y], block }
                    })
                    .collect(),
            })
            .collect();
        TreeJson { root: self.root, blocks, score: self.score(), canonical: self.canonical() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeJson {
    pub root: Option<BlockId>,
    pub blocks: Vec<BlockJson>,
    pub score: PlanScore,
    pub canonical: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockJson {
    pub id: BlockId,
    pub kind: BlockKind,
    pub nodes: Vec<usize>,
    pub boundary: Vec<usize>,
    pub parent: Option<BlockId>,
    pub node_children: Vec<NodeChild>,
    pub edge_children: Vec<EdgeChild>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeChild {
    pub node: usize,
    pub block: BlockId,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeChild {
    pub edge: [usize; 2],
    pub block: BlockId,
}

/// All distinct decomposition trees, sorted by canonical serialization.
pub fn enumerate_trees(q: &QueryGraph) -> Result<Vec<DecompositionTree>> {
    let mut found = BTreeMap::new();
    let mut visited = HashSet::new();
    explore(ContractionState::new(q), &mut visited, &mut found)?;
    Ok(found.into_values().collect())
}

fn explore(
    state: ContractionState,
    visited: &mut HashSet<String>,
    found: &mut BTreeMap<String, DecompositionTree>,
) -> Result<()> {
    if state.is_finished() {
        let tree = state.into_tree();
        found.entry(tree.canonical()).or_insert(tree);
        if found.len() > MAX_TREES {
            return Err(Error::TooManyTrees { limit: MAX_TREES });
        }
        return Ok(());
    }
    if !visited.insert(state.canonical_key()) {
        return Ok(());
    }
    let candidates = state.find_blocks();
    if candidates.is_empty() {
        return Err(Error::Treewidth { residual: state.residual_description() });
    }
    for cand in &candidates {
        explore(state.contract(cand)?, visited, found)?;
    }
    Ok(())
}

/// One decomposition, taking the first available block at every step.
pub fn greedy_tree(q: &QueryGraph) -> Result<DecompositionTree> {
    let mut state = ContractionState::new(q);
    while !state.is_finished() {
        let cand = state
            .find_blocks()
            .into_iter()
            .next()
            .ok_or_else(|| Error::Treewidth { residual: state.residual_description() })?;
        state = state.contract(&cand)?;
    }
    Ok(state.into_tree())
}

/// Picks the tree minimizing (longest cycle, boundary nodes, annotations),
/// breaking ties by canonical serialization.
pub fn select_plan(trees: Vec<DecompositionTree>) -> Result<DecompositionTree> {
    trees
        .into_iter()
        .map(|t| ((t.score(), t.canonical()), t))
        .min_by(|a, b| a.0.cmp(&b.0))
        .map(|(_, t)| t)
        .ok_or(Error::EmptyPlanList)
}

/// Enumerate and select; falls back to [`greedy_tree`] when the plan space
/// exceeds [`MAX_TREES`].
pub fn plan_query(q: &QueryGraph) -> Result<DecompositionTree> {
    match enumerate_trees(q) {
        Ok(trees) => select_plan(trees),
        Err(Error::TooManyTrees { .. }) => greedy_tree(q),
        Err(e) => Err(e),
    }
}
