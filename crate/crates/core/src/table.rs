//! Color signatures, projection tables, and the join primitives the counting
//! engines are built from.
//!
//! A projection table maps `(key vertices, recorded vertices, signature)` to
//! the number of colorful partial matches with those boundary images and that
//! color set. Keys have arity 0 (a scalar), 1 (unary) or 2 (binary, written
//! `(u, v)` with `v` the trailing vertex). Up to two extra slots record the
//! images of boundary nodes met in the interior of a half path.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Coloring, DataGraph, VertexOrdering};
use crate::planner::BlockId;

/// Marks an unused vertex position in an [`EntryKey`].
pub const NO_VERTEX: u32 = u32::MAX;

/// Set of colors, one bit per color (`color c` is bit `c - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct Signature(u32);

impl Signature {
    pub const EMPTY: Signature = Signature(0);

    pub fn from_bits(bits: u32) -> Self {
        Signature(bits)
    }

    #[inline]
    pub fn of_color(c: u8) -> Self {
        Signature(1 << (c - 1))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, c: u8) -> bool {
        self.0 & (1 << (c - 1)) != 0
    }

    #[inline]
    pub fn union(self, other: Signature) -> Signature {
        Signature(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Signature) -> Signature {
        Signature(self.0 & other.0)
    }

    #[inline]
    pub fn with(self, c: u8) -> Signature {
        Signature(self.0 | (1 << (c - 1)))
    }

    /// All colors `1..=k`.
    pub fn full(k: usize) -> Signature {
        if k >= 32 {
            Signature(u32::MAX)
        } else {
            Signature((1u32 << k) - 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntryKey {
    pub verts: [u32; 2],
    pub slots: [u32; 2],
    pub sig: Signature,
}

impl EntryKey {
    pub fn scalar(sig: Signature) -> Self {
        EntryKey { verts: [NO_VERTEX; 2], slots: [NO_VERTEX; 2], sig }
    }

    pub fn unary(v: u32, sig: Signature) -> Self {
        EntryKey { verts: [v, NO_VERTEX], slots: [NO_VERTEX; 2], sig }
    }

    pub fn binary(u: u32, v: u32, sig: Signature) -> Self {
        EntryKey { verts: [u, v], slots: [NO_VERTEX; 2], sig }
    }

    pub fn with_slots(mut self, slots: [u32; 2]) -> Self {
        self.slots = slots;
        self
    }
}

/// Which block produced a table and which query nodes its key positions hold.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableMeta {
    pub block: Option<BlockId>,
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ProjectionTable {
    arity: usize,
    recorded: Vec<usize>,
    entries: FxHashMap<EntryKey, u64>,
    pub meta: TableMeta,
}

impl PartialEq for ProjectionTable {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.recorded == other.recorded && self.entries == other.entries
    }
}

impl Eq for ProjectionTable {}

impl ProjectionTable {
    /// `recorded` lists the query nodes whose images fill the extra slots.
    pub fn new(arity: usize, recorded: Vec<usize>) -> Self {
        assert!(arity <= 2 && recorded.len() <= 2);
        ProjectionTable { arity, recorded, entries: FxHashMap::default(), meta: TableMeta::default() }
    }

    pub fn scalar() -> Self {
        Self::new(0, Vec::new())
    }

    pub fn unary() -> Self {
        Self::new(1, Vec::new())
    }

    pub fn binary() -> Self {
        Self::new(2, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn recorded(&self) -> &[usize] {
        &self.recorded
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &EntryKey) -> u64 {
        self.entries.get(key).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntryKey, u64)> {
        self.entries.iter().map(|(k, &c)| (k, c))
    }

    /// Overwrites an entry; a zero count removes it.
    pub fn insert(&mut self, key: EntryKey, count: u64) {
        if count == 0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, count);
        }
    }

    #[inline]
    pub fn add(&mut self, key: EntryKey, count: u64) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let slot = self.entries.entry(key).or_insert(0);
        *slot = slot.checked_add(count).ok_or(Error::Overflow("table accumulation"))?;
        Ok(())
    }

    pub fn total(&self) -> Result<u64> {
        self.entries.values().try_fold(0u64, |acc, &c| acc.checked_add(c)).ok_or(Error::Overflow("table total"))
    }

    /// Distinct signature sizes present in the table.
    pub fn signature_sizes(&self) -> BTreeSet<usize> {
        self.entries.keys().map(|k| k.sig.len()).collect()
    }

    pub fn sorted(&self) -> Vec<(EntryKey, u64)> {
        let mut v: Vec<_> = self.entries.iter().map(|(k, &c)| (*k, c)).collect();
        v.sort_unstable();
        v
    }

    /// One line per entry: key vertices, recorded vertices, signature mask
    /// (decimal) and count, sorted.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.sorted() {
            for &v in &k.verts[..self.arity] {
                let _ = write!(out, "{v} ");
            }
            for &x in &k.slots[..self.recorded.len()] {
                let _ = write!(out, "{x} ");
            }
            let _ = writeln!(out, "{} {c}", k.sig.bits());
        }
        out
    }

    pub fn transpose(&self) -> Result<ProjectionTable> {
        if self.arity != 2 {
            return Err(Error::Schema(format!("transpose needs a binary table, got arity {}", self.arity)));
        }
        let mut out = ProjectionTable::new(2, self.recorded.clone());
        out.meta.block = self.meta.block;
        out.meta.boundary = self.meta.boundary.iter().rev().copied().collect();
        out.entries =
            self.entries.iter().map(|(k, &c)| (EntryKey { verts: [k.verts[1], k.verts[0]], ..*k }, c)).collect();
        Ok(out)
    }

    /// Adds every entry of `other` into `self`.
    pub fn absorb(&mut self, other: &ProjectionTable) -> Result<()> {
        if self.arity != other.arity || self.recorded != other.recorded {
            return Err(Error::Schema("cannot add tables with different key layouts".into()));
        }
        for (k, c) in other.iter() {
            self.add(*k, c)?;
        }
        Ok(())
    }

    /// Sums out the trailing key vertex of a binary table.
    pub fn project_leading(&self) -> Result<ProjectionTable> {
        if self.arity != 2 || !self.recorded.is_empty() {
            return Err(Error::Schema("projection needs a binary table without recorded slots".into()));
        }
        let mut out = ProjectionTable::unary();
        for (k, c) in self.iter() {
            out.add(EntryKey::unary(k.verts[0], k.sig), c)?;
        }
        Ok(out)
    }

    /// Keeps entries satisfying `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&EntryKey) -> bool) -> ProjectionTable {
        let mut out = ProjectionTable::new(self.arity, self.recorded.clone());
        out.meta = self.meta.clone();
        out.entries = self.entries.iter().filter(|(k, _)| keep(k)).map(|(k, &c)| (*k, c)).collect();
        out
    }
}

/// One entry per ordered pair `(u, v)` over a bichromatic edge, with count 1.
pub fn edge_table(g: &DataGraph, chi: &Coloring) -> ProjectionTable {
    let mut t = ProjectionTable::binary();
    for v in 0..g.n() as u32 {
        let cv = chi.color(v);
        for &u in g.neighbors(v) {
            let cu = chi.color(u);
            if cu != cv {
                t.insert(EntryKey::binary(u, v, Signature::of_color(cu).with(cv)), 1);
            }
        }
    }
    t
}

/// Right-hand side of an edge extension: graph edges or a block's binary table.
#[derive(Debug, Clone, Copy)]
pub enum EdgeSource<'t, T = ProjectionTable> {
    Graph,
    Table(&'t T),
}

/// Which key vertex a unary table is joined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Leading,
    Trailing,
}

/// Where an output key vertex of [`Joiner::merge_halves`] comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotSource {
    Lead,
    Trail,
    Plus(usize),
    Minus(usize),
}

/// Join context over one data graph and coloring. Counts every increment of
/// an output entry in [`ops`](Joiner::ops).
#[derive(Debug)]
pub struct Joiner<'a> {
    graph: &'a DataGraph,
    chi: &'a Coloring,
    order: &'a VertexOrdering,
    ops: u64,
}

fn check_binary(t: &ProjectionTable, what: &str) -> Result<()> {
    if t.arity != 2 {
        return Err(Error::Schema(format!("{what} needs a binary table, got arity {}", t.arity)));
    }
    Ok(())
}

fn recorded_after(t: &ProjectionTable, record: Option<usize>) -> Result<Vec<usize>> {
    let mut recorded = t.recorded.clone();
    if let Some(node) = record {
        if recorded.contains(&node) {
            return Err(Error::Schema(format!("query node {node} is already recorded")));
        }
        if recorded.len() == 2 {
            return Err(Error::Schema("no free recorded slot".into()));
        }
        recorded.push(node);
    }
    Ok(recorded)
}

#[inline]
fn mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or(Error::Overflow("count product"))
}

impl<'a> Joiner<'a> {
    pub fn new(graph: &'a DataGraph, chi: &'a Coloring, order: &'a VertexOrdering) -> Self {
        Joiner { graph, chi, order, ops: 0 }
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn coloring(&self) -> &Coloring {
        self.chi
    }

    /// Table for the first edge of a half path. With `cap`, only entries with
    /// a higher leading vertex are kept. `record` stores the trailing vertex
    /// in a new slot.
    pub fn seed(&mut self, first: EdgeSource<'_>, cap: bool, record: Option<usize>) -> Result<ProjectionTable> {
        let mut out = ProjectionTable::new(2, recorded_after(&ProjectionTable::binary(), record)?);
        let slot = |v: u32| if record.is_some() { [v, NO_VERTEX] } else { [NO_VERTEX; 2] };
        match first {
            EdgeSource::Graph => {
                for v in 0..self.graph.n() as u32 {
                    let cv = self.chi.color(v);
                    for &u in self.graph.neighbors(v) {
                        let cu = self.chi.color(u);
                        if cu == cv || (cap && !self.order.higher(u, v)) {
                            continue;
                        }
                        let key = EntryKey::binary(u, v, Signature::of_color(cu).with(cv)).with_slots(slot(v));
                        out.add(key, 1)?;
                        self.ops += 1;
                    }
                }
            }
            EdgeSource::Table(t) => {
                check_binary(t, "seed")?;
                if !t.recorded.is_empty() {
                    return Err(Error::Schema("seed table already has recorded slots".into()));
                }
                for (k, c) in t.iter() {
                    let (u, v) = (k.verts[0], k.verts[1]);
                    if cap && !self.order.higher(u, v) {
                        continue;
                    }
                    out.add(EntryKey { slots: slot(v), ..*k }, c)?;
                    self.ops += 1;
                }
            }
        }
        Ok(out)
    }

    /// Extends every `(u, v)` entry across an edge `(v, w)`. The two
    /// signatures must overlap in exactly `chi(v)`; with `cap`, `u ≻ w` is
    /// also required.
    pub fn edge_join(
        &mut self,
        t: &ProjectionTable,
        right: EdgeSource<'_>,
        cap: bool,
        record: Option<usize>,
    ) -> Result<ProjectionTable> {
        check_binary(t, "edge_join")?;
        let mut out = ProjectionTable::new(2, recorded_after(t, record)?);
        let slot_idx = t.recorded.len();
        let emit = |k: &EntryKey, w: u32, sig: Signature| {
            let mut slots = k.slots;
            if record.is_some() {
                slots[slot_idx] = w;
            }
            EntryKey { verts: [k.verts[0], w], slots, sig }
        };
        match right {
            EdgeSource::Graph => {
                for (k, c) in t.iter() {
                    let (u, v) = (k.verts[0], k.verts[1]);
                    for &w in self.graph.neighbors(v) {
                        let cw = self.chi.color(w);
                        if k.sig.contains(cw) || (cap && !self.order.higher(u, w)) {
                            continue;
                        }
                        out.add(emit(k, w, k.sig.with(cw)), c)?;
                        self.ops += 1;
                    }
                }
            }
            EdgeSource::Table(r) => {
                check_binary(r, "edge_join right side")?;
                if !r.recorded.is_empty() {
                    return Err(Error::Schema("edge_join right side has recorded slots".into()));
                }
                let mut index: FxHashMap<u32, Vec<(u32, Signature, u64)>> = FxHashMap::default();
                for (k, c) in r.iter() {
                    index.entry(k.verts[0]).or_default().push((k.verts[1], k.sig, c));
                }
                for (k, c1) in t.iter() {
                    let (u, v) = (k.verts[0], k.verts[1]);
                    let Some(ext) = index.get(&v) else { continue };
                    let cv = Signature::of_color(self.chi.color(v));
                    for &(w, sig2, c2) in ext {
                        if k.sig.intersection(sig2) != cv || (cap && !self.order.higher(u, w)) {
                            continue;
                        }
                        out.add(emit(k, w, k.sig.union(sig2)), mul(c1, c2)?)?;
                        self.ops += 1;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Combines each entry with the unary table entries on its leading or
    /// trailing vertex `x`, requiring the signatures to overlap in exactly
    /// `chi(x)`.
    pub fn node_join(&mut self, t: &ProjectionTable, unary: &ProjectionTable, side: Side) -> Result<ProjectionTable> {
        check_binary(t, "node_join")?;
        if unary.arity != 1 || !unary.recorded.is_empty() {
            return Err(Error::Schema("node_join needs a plain unary table".into()));
        }
        let mut index: FxHashMap<u32, Vec<(Signature, u64)>> = FxHashMap::default();
        for (k, c) in unary.iter() {
            index.entry(k.verts[0]).or_default().push((k.sig, c));
        }
        let pos = match side {
            Side::Leading => 0,
            Side::Trailing => 1,
        };
        let mut out = ProjectionTable::new(2, t.recorded.clone());
        for (k, c1) in t.iter() {
            let x = k.verts[pos];
            let Some(ext) = index.get(&x) else { continue };
            let cx = Signature::of_color(self.chi.color(x));
            for &(sig2, c2) in ext {
                if k.sig.intersection(sig2) != cx {
                    continue;
                }
                out.add(EntryKey { sig: k.sig.union(sig2), ..*k }, mul(c1, c2)?)?;
                self.ops += 1;
            }
        }
        Ok(out)
    }

    /// Joins two half-path tables on equal `(u, v)` keys whose signatures
    /// overlap in exactly `{chi(u), chi(v)}`. The output key is assembled
    /// from `out`; an empty `out` yields a scalar table.
    pub fn merge_halves(
        &mut self,
        plus: &ProjectionTable,
        minus: &ProjectionTable,
        out: &[SlotSource],
    ) -> Result<ProjectionTable> {
        check_binary(plus, "merge_halves")?;
        check_binary(minus, "merge_halves")?;
        if out.len() > 2 {
            return Err(Error::Schema("merge output has at most two key vertices".into()));
        }
        for s in out {
            let ok = match *s {
                SlotSource::Plus(i) => i < plus.recorded.len(),
                SlotSource::Minus(i) => i < minus.recorded.len(),
                _ => true,
            };
            if !ok {
                return Err(Error::Schema(format!("merge output refers to missing slot {s:?}")));
            }
        }
        let mut index: FxHashMap<(u32, u32), Vec<HalfEntry>> = FxHashMap::default();
        for (k, c) in minus.iter() {
            index.entry((k.verts[0], k.verts[1])).or_default().push((k.slots, k.sig, c));
        }
        let mut table = ProjectionTable::new(out.len(), Vec::new());
        for (k, c1) in plus.iter() {
            let (u, v) = (k.verts[0], k.verts[1]);
            let Some(matches) = index.get(&(u, v)) else { continue };
            let ends = Signature::of_color(self.chi.color(u)).with(self.chi.color(v));
            for &(mslots, sig2, c2) in matches {
                if k.sig.intersection(sig2) != ends {
                    continue;
                }
                let mut verts = [NO_VERTEX; 2];
                for (i, s) in out.iter().enumerate() {
                    verts[i] = match *s {
                        SlotSource::Lead => u,
                        SlotSource::Trail => v,
                        SlotSource::Plus(j) => k.slots[j],
                        SlotSource::Minus(j) => mslots[j],
                    };
                }
                let key = EntryKey { verts, slots: [NO_VERTEX; 2], sig: k.sig.union(sig2) };
                table.add(key, mul(c1, c2)?)?;
                self.ops += 1;
            }
        }
        Ok(table)
    }
}

/// Recorded slots, signature and count of one half-path entry.
type HalfEntry = ([u32; 2], Signature, u64);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degree_rank;

    fn rainbow(n: usize) -> Coloring {
        Coloring::new((1..=n as u8).collect(), n).unwrap()
    }

    #[test]
    fn signature_basics() {
        let s = Signature::of_color(1).with(3);
        assert_eq!(s.bits(), 0b101);
        assert_eq!(s.len(), 2);
        assert!(s.contains(3) && !s.contains(2));
        assert_eq!(Signature::full(3).bits(), 0b111);
        assert_eq!(Signature::full(32).bits(), u32::MAX);
    }

    #[test]
    fn edge_table_examples() {
        let g = DataGraph::from_edges(2, &[(0, 1)]);
        let t = edge_table(&g, &rainbow(2));
        let sig = Signature::from_bits(0b11);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get(&EntryKey::binary(0, 1, sig)), 1);
        assert_eq!(t.get(&EntryKey::binary(1, 0, sig)), 1);

        let mono = Coloring::new(vec![1, 1], 2).unwrap();
        assert!(edge_table(&g, &mono).is_empty());

        let tri = DataGraph::complete(3);
        let t = edge_table(&tri, &rainbow(3));
        assert_eq!(t.len(), 6);
        assert!(t.iter().all(|(_, c)| c == 1));
        assert_eq!(t.transpose().unwrap(), t);
    }

    #[test]
    fn edge_join_extends_paths() {
        let g = DataGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let chi = rainbow(3);
        let order = degree_rank(&g);
        let mut j = Joiner::new(&g, &chi, &order);
        let mut start = ProjectionTable::binary();
        start.insert(EntryKey::binary(0, 1, Signature::from_bits(0b011)), 1);
        let out = j.edge_join(&start, EdgeSource::Graph, false, None).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.get(&EntryKey::binary(0, 2, Signature::from_bits(0b111))), 1);

        let clash = Coloring::new(vec![1, 2, 1], 3).unwrap();
        let mut j = Joiner::new(&g, &clash, &order);
        let mut start = ProjectionTable::binary();
        start.insert(EntryKey::binary(0, 1, Signature::from_bits(0b011)), 1);
        assert!(j.edge_join(&start, EdgeSource::Graph, false, None).unwrap().is_empty());
    }

    #[test]
    fn capped_edge_join_on_triangle() {
        let g = DataGraph::complete(3);
        let chi = rainbow(3);
        let order = degree_rank(&g);
        let mut j = Joiner::new(&g, &chi, &order);
        let edges = edge_table(&g, &chi);

        let mut from_top = ProjectionTable::binary();
        from_top.insert(EntryKey::binary(2, 1, Signature::from_bits(0b110)), 1);
        let out = j.edge_join(&from_top, EdgeSource::Table(&edges), true, None).unwrap();
        assert_eq!(out.get(&EntryKey::binary(2, 0, Signature::from_bits(0b111))), 1);

        let mut from_bottom = ProjectionTable::binary();
        from_bottom.insert(EntryKey::binary(0, 1, Signature::from_bits(0b011)), 1);
        let out = j.edge_join(&from_bottom, EdgeSource::Table(&edges), true, None).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn node_join_examples() {
        let g = DataGraph::complete(4);
        let chi = rainbow(4);
        let order = degree_rank(&g);
        let mut j = Joiner::new(&g, &chi, &order);
        let mut t = ProjectionTable::binary();
        t.insert(EntryKey::binary(0, 1, Signature::from_bits(0b0011)), 2);
        let mut unary = ProjectionTable::unary();
        unary.insert(EntryKey::unary(1, Signature::from_bits(0b0110)), 3);
        let out = j.node_join(&t, &unary, Side::Trailing).unwrap();
        assert_eq!(out.get(&EntryKey::binary(0, 1, Signature::from_bits(0b0111))), 6);
        assert_eq!(out.len(), 1);

        assert!(j.node_join(&t, &ProjectionTable::unary(), Side::Trailing).unwrap().is_empty());

        let mut overlapping = ProjectionTable::unary();
        overlapping.insert(EntryKey::unary(1, Signature::from_bits(0b0011)), 3);
        assert!(j.node_join(&t, &overlapping, Side::Trailing).unwrap().is_empty());

        let mut lead = ProjectionTable::unary();
        lead.insert(EntryKey::unary(0, Signature::from_bits(0b1001)), 5);
        let out = j.node_join(&t, &lead, Side::Leading).unwrap();
        assert_eq!(out.get(&EntryKey::binary(0, 1, Signature::from_bits(0b1011))), 10);
    }

    #[test]
    fn merge_examples() {
        let g = DataGraph::complete(3);
        let chi = rainbow(3);
        let order = degree_rank(&g);
        let mut j = Joiner::new(&g, &chi, &order);
        let mut plus = ProjectionTable::binary();
        plus.insert(EntryKey::binary(0, 1, Signature::from_bits(0b011)), 1);
        let mut minus = ProjectionTable::binary();
        minus.insert(EntryKey::binary(0, 1, Signature::from_bits(0b111)), 1);
        let out = j.merge_halves(&plus, &minus, &[SlotSource::Lead, SlotSource::Trail]).unwrap();
        assert_eq!(out.get(&EntryKey::binary(0, 1, Signature::from_bits(0b111))), 1);

        let empty = ProjectionTable::binary();
        assert!(j.merge_halves(&plus, &empty, &[]).unwrap().is_empty());
        assert!(j.merge_halves(&empty, &minus, &[]).unwrap().is_empty());

        // Both halves use color 3 beyond the shared endpoints.
        let mut p3 = ProjectionTable::binary();
        p3.insert(EntryKey::binary(0, 1, Signature::from_bits(0b111)), 1);
        assert!(j.merge_halves(&p3, &minus, &[]).unwrap().is_empty());

        assert!(matches!(j.merge_halves(&plus, &minus, &[SlotSource::Plus(0)]), Err(Error::Schema(_))));
        assert!(matches!(j.merge_halves(&ProjectionTable::unary(), &minus, &[]), Err(Error::Schema(_))));
    }

    #[test]
    fn transpose_examples() {
        let mut t = ProjectionTable::binary();
        let a = Signature::from_bits(0b11);
        t.insert(EntryKey::binary(0, 1, a), 5);
        let tt = t.transpose().unwrap();
        assert_eq!(tt.get(&EntryKey::binary(1, 0, a)), 5);
        assert_eq!(tt.transpose().unwrap(), t);
        assert!(matches!(ProjectionTable::unary().transpose(), Err(Error::Schema(_))));
    }

    #[test]
    fn recorded_slot_collision_is_a_schema_error() {
        let g = DataGraph::complete(4);
        let chi = rainbow(4);
        let order = degree_rank(&g);
        let mut j = Joiner::new(&g, &chi, &order);
        let t = j.seed(EdgeSource::Graph, false, Some(3)).unwrap();
        assert_eq!(t.recorded(), &[3]);
        assert!(matches!(j.edge_join(&t, EdgeSource::Graph, false, Some(3)), Err(Error::Schema(_))));
    }

    #[test]
    fn overflow_is_detected() {
        let mut t = ProjectionTable::unary();
        t.insert(EntryKey::unary(0, Signature::from_bits(1)), u64::MAX);
        assert!(matches!(t.add(EntryKey::unary(0, Signature::from_bits(1)), 1), Err(Error::Overflow(_))));
    }

    #[test]
    fn dump_is_sorted() {
        let mut t = ProjectionTable::binary();
        t.insert(EntryKey::binary(1, 0, Signature::from_bits(3)), 2);
        t.insert(EntryKey::binary(0, 1, Signature::from_bits(3)), 1);
        assert_eq!(t.dump(), "0 1 3 1\n1 0 3 2\n");
    }
}
