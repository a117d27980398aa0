//! Bottom-up evaluation of a decomposition tree.
//!
//! Every block is solved into a table keyed on its boundary nodes. A cycle
//! block is split at two positions `h` and `d` into a clockwise half
//! (`h, h+1, …, d`) and a counterclockwise half (`h, h-1, …, d`); the two
//! half-path tables are merged on their shared endpoints. The path-splitting
//! engine (PS) splits once, at the boundary nodes. The degree-based engine
//! (DB) splits once per position `h`, keeps only half paths whose start
//! vertex outranks every other cycle vertex, and sums the results.
//!
//! The engine is written against [`JoinBackend`], so the same traversal runs
//! sequentially ([`Joiner`]) or on partitioned workers.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{degree_rank, Coloring, DataGraph, VertexOrdering};
use crate::planner::{Block, BlockId, BlockKind, DecompositionTree};
use crate::table::{EdgeSource, Joiner, ProjectionTable, Side, SlotSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Ps,
    Db,
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ps" => Ok(EngineKind::Ps),
            "db" => Ok(EngineKind::Db),
            other => Err(Error::InvalidArgument(format!("unknown engine {other:?}, expected ps or db"))),
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::Ps => "ps",
            EngineKind::Db => "db",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Clockwise,
    Counterclockwise,
}

/// One half of a split cycle, from position `start` to position `end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfPathSpec {
    pub start: usize,
    pub end: usize,
    pub direction: Direction,
    /// Restrict every later vertex to rank below the start vertex.
    pub cap: bool,
    /// Join the annotation of the start node (on the leading key).
    pub join_start: bool,
    /// Join the annotation of the end node (on the trailing key).
    pub join_end: bool,
}

impl HalfPathSpec {
    /// Clockwise half of the split `(h, d)`; it owns the annotation on `d`.
    pub fn plus(h: usize, d: usize, cap: bool) -> Self {
        HalfPathSpec { start: h, end: d, direction: Direction::Clockwise, cap, join_start: false, join_end: true }
    }

    /// Counterclockwise half of the split `(h, d)`; it owns the annotation on `h`.
    pub fn minus(h: usize, d: usize, cap: bool) -> Self {
        HalfPathSpec {
            start: h,
            end: d,
            direction: Direction::Counterclockwise,
            cap,
            join_start: true,
            join_end: false,
        }
    }

    fn step(&self, p: usize, len: usize) -> usize {
        match self.direction {
            Direction::Clockwise => (p + 1) % len,
            Direction::Counterclockwise => (p + len - 1) % len,
        }
    }

    /// Cycle positions visited, `start` and `end` included.
    pub fn positions(&self, len: usize) -> Vec<usize> {
        let mut out = vec![self.start];
        let mut p = self.start;
        while p != self.end {
            p = self.step(p, len);
            out.push(p);
        }
        out
    }

    /// Boundary nodes strictly inside the path, in traversal order. Their
    /// images occupy the recorded slots of the half-path table.
    pub fn recorded(&self, block: &Block) -> Vec<usize> {
        let pos = self.positions(block.len());
        pos[1..pos.len() - 1].iter().map(|&p| block.nodes[p]).filter(|a| block.boundary.contains(a)).collect()
    }
}

/// Operations a table representation must provide to run the engine.
pub trait JoinBackend {
    type Table;

    fn vertex_count(&self) -> usize;
    fn seed(&mut self, first: EdgeSource<'_, Self::Table>, cap: bool, record: Option<usize>) -> Result<Self::Table>;
    fn edge_join(
        &mut self,
        t: &Self::Table,
        right: EdgeSource<'_, Self::Table>,
        cap: bool,
        record: Option<usize>,
    ) -> Result<Self::Table>;
    fn node_join(&mut self, t: &Self::Table, unary: &Self::Table, side: Side) -> Result<Self::Table>;
    fn merge_halves(&mut self, plus: &Self::Table, minus: &Self::Table, out: &[SlotSource]) -> Result<Self::Table>;
    fn transpose(&mut self, t: &Self::Table) -> Result<Self::Table>;
    fn project_leading(&mut self, t: &Self::Table) -> Result<Self::Table>;
    fn empty(&mut self, arity: usize) -> Self::Table;
    fn accumulate(&mut self, acc: &mut Self::Table, t: &Self::Table) -> Result<()>;
    fn total(&mut self, t: &Self::Table) -> Result<u64>;
}

impl JoinBackend for Joiner<'_> {
    type Table = ProjectionTable;

    fn vertex_count(&self) -> usize {
        self.coloring().len()
    }

    fn seed(&mut self, first: EdgeSource<'_>, cap: bool, record: Option<usize>) -> Result<ProjectionTable> {
        Joiner::seed(self, first, cap, record)
    }

    fn edge_join(
        &mut self,
        t: &ProjectionTable,
        right: EdgeSource<'_>,
        cap: bool,
        record: Option<usize>,
    ) -> Result<ProjectionTable> {
        Joiner::edge_join(self, t, right, cap, record)
    }

    fn node_join(&mut self, t: &ProjectionTable, unary: &ProjectionTable, side: Side) -> Result<ProjectionTable> {
        Joiner::node_join(self, t, unary, side)
    }

    fn merge_halves(
        &mut self,
        plus: &ProjectionTable,
        minus: &ProjectionTable,
        out: &[SlotSource],
    ) -> Result<ProjectionTable> {
        Joiner::merge_halves(self, plus, minus, out)
    }

    fn transpose(&mut self, t: &ProjectionTable) -> Result<ProjectionTable> {
        t.transpose()
    }

    fn project_leading(&mut self, t: &ProjectionTable) -> Result<ProjectionTable> {
        t.project_leading()
    }

    fn empty(&mut self, arity: usize) -> ProjectionTable {
        ProjectionTable::new(arity, Vec::new())
    }

    fn accumulate(&mut self, acc: &mut ProjectionTable, t: &ProjectionTable) -> Result<()> {
        acc.absorb(t)
    }

    fn total(&mut self, t: &ProjectionTable) -> Result<u64> {
        t.total()
    }
}

/// A solved block: its table keyed on `boundary` (in that order) and, for two
/// boundary nodes, the transposed table.
#[derive(Debug, Clone)]
pub struct Solved<T> {
    pub table: T,
    pub transposed: Option<T>,
    pub boundary: Vec<usize>,
}

/// Tables of already solved blocks, indexed by block id.
#[derive(Debug, Clone)]
pub struct SolvedBlocks<T> {
    slots: Vec<Option<Solved<T>>>,
}

impl<T> SolvedBlocks<T> {
    pub fn new(block_count: usize) -> Self {
        SolvedBlocks { slots: (0..block_count).map(|_| None).collect() }
    }

    pub fn insert(&mut self, id: BlockId, solved: Solved<T>) {
        self.slots[id] = Some(solved);
    }

    pub fn get(&self, id: BlockId) -> Result<&Solved<T>> {
        self.slots
            .get(id)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Schema(format!("block {id} used before it was solved")))
    }

    /// Binary table of block `id` keyed `(image of from, image of to)`.
    pub fn oriented(&self, id: BlockId, from: usize, to: usize) -> Result<&T> {
        let s = self.get(id)?;
        match s.boundary.as_slice() {
            [x, y] if (*x, *y) == (from, to) => Ok(&s.table),
            [x, y] if (*x, *y) == (to, from) => {
                s.transposed.as_ref().ok_or_else(|| Error::Schema(format!("block {id} has no transposed table")))
            }
            other => Err(Error::Schema(format!("block {id} has boundary {other:?}, wanted edge {from}-{to}"))),
        }
    }

    /// Unary table of block `id`, which must be keyed on `node`.
    pub fn unary(&self, id: BlockId, node: usize) -> Result<&T> {
        let s = self.get(id)?;
        if s.boundary != [node] {
            return Err(Error::Schema(format!("block {id} has boundary {:?}, wanted node {node}", s.boundary)));
        }
        Ok(&s.table)
    }

    pub fn into_tables(self) -> Vec<Option<Solved<T>>> {
        self.slots
    }
}

/// Split used by PS: at the two boundary nodes, or at the single boundary
/// node and its opposite, or at position 0 and its opposite.
pub fn ps_split(block: &Block) -> (usize, usize) {
    let len = block.len();
    let pos = |a: usize| block.position(a).expect("boundary node lies on its block");
    match block.boundary.as_slice() {
        [a, b] => (pos(*a), pos(*b)),
        [a] => (pos(*a), (pos(*a) + len / 2) % len),
        _ => (0, len / 2),
    }
}

/// Split used by DB for high position `h`.
pub fn db_split(block: &Block, h: usize) -> (usize, usize) {
    (h, (h + block.len() / 2) % block.len())
}

pub struct Engine<B> {
    backend: B,
    kind: EngineKind,
}

impl<B: JoinBackend> Engine<B> {
    pub fn new(backend: B, kind: EngineKind) -> Self {
        Engine { backend, kind }
    }

    pub fn kind(&self) -> EngineKind {
        self.kind
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn into_backend(self) -> B {
        self.backend
    }

    fn edge_source<'t>(
        block: &Block,
        edge: usize,
        from: usize,
        to: usize,
        kids: &'t SolvedBlocks<B::Table>,
    ) -> Result<EdgeSource<'t, B::Table>> {
        Ok(match block.edge_child(edge) {
            Some(c) => EdgeSource::Table(kids.oriented(c, from, to)?),
            None => EdgeSource::Graph,
        })
    }

    /// Table of one half path of a cycle block, keyed `(start, end)` plus the
    /// recorded interior boundary nodes.
    pub fn half_path(&mut self, block: &Block, spec: &HalfPathSpec, kids: &SolvedBlocks<B::Table>) -> Result<B::Table> {
        let len = block.len();
        let positions = spec.positions(len);
        let edge_pos = |p: usize, q: usize| match spec.direction {
            Direction::Clockwise => p,
            Direction::Counterclockwise => q,
        };
        let record = |q: usize| {
            let a = block.nodes[q];
            (q != spec.end && block.boundary.contains(&a)).then_some(a)
        };

        let (p0, p1) = (positions[0], positions[1]);
        let first = Self::edge_source(block, edge_pos(p0, p1), block.nodes[p0], block.nodes[p1], kids)?;
        let mut t = self.backend.seed(first, spec.cap, record(p1))?;
        for w in positions[1..].windows(2) {
            let (p, q) = (w[0], w[1]);
            if let Some(c) = block.node_child(p) {
                t = self.backend.node_join(&t, kids.unary(c, block.nodes[p])?, Side::Trailing)?;
            }
            let right = Self::edge_source(block, edge_pos(p, q), block.nodes[p], block.nodes[q], kids)?;
            t = self.backend.edge_join(&t, right, spec.cap, record(q))?;
        }
        if spec.join_end {
            if let Some(c) = block.node_child(spec.end) {
                t = self.backend.node_join(&t, kids.unary(c, block.nodes[spec.end])?, Side::Trailing)?;
            }
        }
        if spec.join_start {
            if let Some(c) = block.node_child(spec.start) {
                t = self.backend.node_join(&t, kids.unary(c, block.nodes[spec.start])?, Side::Leading)?;
            }
        }
        Ok(t)
    }

    /// Merged table for the split `(h, d)`, keyed on the block's boundary
    /// nodes in order.
    pub fn cycle_split(
        &mut self,
        block: &Block,
        h: usize,
        d: usize,
        cap: bool,
        kids: &SolvedBlocks<B::Table>,
    ) -> Result<B::Table> {
        let plus_spec = HalfPathSpec::plus(h, d, cap);
        let minus_spec = HalfPathSpec::minus(h, d, cap);
        let plus_rec = plus_spec.recorded(block);
        let minus_rec = minus_spec.recorded(block);
        let out: Vec<SlotSource> = block
            .boundary
            .iter()
            .map(|&a| {
                if a == block.nodes[h] {
                    SlotSource::Lead
                } else if a == block.nodes[d] {
                    SlotSource::Trail
                } else if let Some(i) = plus_rec.iter().position(|&x| x == a) {
                    SlotSource::Plus(i)
                } else {
                    let i = minus_rec.iter().position(|&x| x == a).expect("boundary node lies on one half");
                    SlotSource::Minus(i)
                }
            })
            .collect();
        let plus = self.half_path(block, &plus_spec, kids)?;
        let minus = self.half_path(block, &minus_spec, kids)?;
        self.backend.merge_halves(&plus, &minus, &out)
    }

    /// DB tables for every high position `h`, in order. Their key-wise sum is
    /// the block's table.
    pub fn db_tables_per_h(&mut self, block: &Block, kids: &SolvedBlocks<B::Table>) -> Result<Vec<B::Table>> {
        (0..block.len())
            .map(|h| {
                let (h, d) = db_split(block, h);
                self.cycle_split(block, h, d, true, kids)
            })
            .collect()
    }

    pub fn solve_cycle(&mut self, block: &Block, kids: &SolvedBlocks<B::Table>) -> Result<B::Table> {
        match self.kind {
            EngineKind::Ps => {
                let (h, d) = ps_split(block);
                self.cycle_split(block, h, d, false, kids)
            }
            EngineKind::Db => {
                let mut acc = self.backend.empty(block.boundary.len());
                for h in 0..block.len() {
                    let (h, d) = db_split(block, h);
                    let t = self.cycle_split(block, h, d, true, kids)?;
                    self.backend.accumulate(&mut acc, &t)?;
                }
                Ok(acc)
            }
        }
    }

    /// Unary table on the leaf block's first node `a`.
    pub fn solve_leaf(&mut self, block: &Block, kids: &SolvedBlocks<B::Table>) -> Result<B::Table> {
        let (a, b) = (block.nodes[0], block.nodes[1]);
        let first = Self::edge_source(block, 0, a, b, kids)?;
        let mut t = self.backend.seed(first, false, None)?;
        if let Some(c) = block.node_child(1) {
            t = self.backend.node_join(&t, kids.unary(c, b)?, Side::Trailing)?;
        }
        if let Some(c) = block.node_child(0) {
            t = self.backend.node_join(&t, kids.unary(c, a)?, Side::Leading)?;
        }
        self.backend.project_leading(&t)
    }

    pub fn solve_block(&mut self, block: &Block, kids: &SolvedBlocks<B::Table>) -> Result<Solved<B::Table>> {
        let (table, boundary) = match block.kind {
            BlockKind::Cycle => (self.solve_cycle(block, kids)?, block.boundary.clone()),
            BlockKind::LeafEdge => (self.solve_leaf(block, kids)?, vec![block.nodes[0]]),
        };
        let transposed = if boundary.len() == 2 { Some(self.backend.transpose(&table)?) } else { None };
        Ok(Solved { table, transposed, boundary })
    }

    /// Solves every block bottom-up.
    pub fn solve_tree(&mut self, tree: &DecompositionTree) -> Result<SolvedBlocks<B::Table>> {
        let mut kids = SolvedBlocks::new(tree.blocks().len());
        for id in tree.post_order() {
            let solved = self.solve_block(tree.block(id), &kids)?;
            kids.insert(id, solved);
        }
        Ok(kids)
    }

    /// Number of colorful matches of the tree's query.
    pub fn count(&mut self, tree: &DecompositionTree) -> Result<u64> {
        let Some(root) = tree.root() else {
            return Ok(self.backend.vertex_count() as u64);
        };
        let solved = self.solve_tree(tree)?;
        let root_table = &solved.get(root)?.table;
        self.backend.total(root_table)
    }
}

/// Colorful-match count together with the number of table increments spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountOutcome {
    pub count: u64,
    pub ops: u64,
}

fn check_colors(tree: &DecompositionTree, chi: &Coloring) -> Result<()> {
    if chi.k() < tree.query().k() {
        return Err(Error::InvalidArgument(format!(
            "{} colors cannot color a {}-node query",
            chi.k(),
            tree.query().k()
        )));
    }
    Ok(())
}

pub fn count_with_order(
    g: &DataGraph,
    chi: &Coloring,
    order: &VertexOrdering,
    tree: &DecompositionTree,
    kind: EngineKind,
) -> Result<CountOutcome> {
    check_colors(tree, chi)?;
    let mut engine = Engine::new(Joiner::new(g, chi, order), kind);
    let count = engine.count(tree)?;
    Ok(CountOutcome { count, ops: engine.backend().ops() })
}

/// Number of colorful matches of the tree's query under `chi`.
pub fn count_colorful(g: &DataGraph, chi: &Coloring, tree: &DecompositionTree, kind: EngineKind) -> Result<u64> {
    Ok(count_with_order(g, chi, &degree_rank(g), tree, kind)?.count)
}

/// Table of every block, indexed by block id. Leaf tables are keyed on the
/// leaf's first node; the root cycle's table is a scalar.
pub fn block_tables(
    g: &DataGraph,
    chi: &Coloring,
    tree: &DecompositionTree,
    kind: EngineKind,
) -> Result<Vec<ProjectionTable>> {
    check_colors(tree, chi)?;
    let order = degree_rank(g);
    let mut engine = Engine::new(Joiner::new(g, chi, &order), kind);
    let solved = engine.solve_tree(tree)?;
    solved
        .into_tables()
        .into_iter()
        .enumerate()
        .map(|(id, s)| {
            let s = s.ok_or_else(|| Error::Schema(format!("block {id} is unreachable from the root")))?;
            let mut t = s.table;
            t.meta.block = Some(id);
            t.meta.boundary = s.boundary;
            Ok(t)
        })
        .collect()
}
