//! Partitioned execution of the counting engine.
//!
//! Vertices are split into `p` contiguous blocks, one per worker. A worker
//! stores the adjacency of its vertices together with each neighbor's rank
//! and color, and every table entry lives on the worker owning its trailing
//! key vertex (the only key vertex of a unary table). Each join is one or two
//! bulk-synchronous rounds: workers process their resident entries in
//! parallel, buffer outgoing entries per destination, and the buffers are
//! delivered at the barrier. Ranks of the leading and recorded vertices
//! travel with each entry, so no worker reads state it does not own.

use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::engine::{Engine, EngineKind, JoinBackend};
use crate::error::{Error, Result};
use crate::graph::{Coloring, DataGraph, VertexOrdering};
use crate::planner::DecompositionTree;
use crate::table::{EdgeSource, EntryKey, Side, Signature, SlotSource, NO_VERTEX};

/// Contiguous 1D distribution of vertices over `p` workers. The first
/// `n mod p` blocks hold `⌈n/p⌉` vertices, the rest `⌊n/p⌋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    starts: Vec<u32>,
}

pub fn partition_vertices(g: &DataGraph, p: usize) -> Result<Partition> {
    Partition::new(g.n(), p)
}

impl Partition {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("at least one worker is required".into()));
        }
        if p > n {
            return Err(Error::InvalidArgument(format!("{p} workers for {n} vertices")));
        }
        let (q, r) = (n / p, n % p);
        let mut starts = Vec::with_capacity(p + 1);
        let mut s = 0u32;
        for w in 0..p {
            starts.push(s);
            s += (q + usize::from(w < r)) as u32;
        }
        starts.push(s);
        Ok(Partition { starts })
    }

    pub fn p(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn n(&self) -> usize {
        *self.starts.last().expect("non-empty") as usize
    }

    pub fn range(&self, worker: usize) -> Range<u32> {
        self.starts[worker]..self.starts[worker + 1]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.starts.windows(2).map(|w| (w[1] - w[0]) as usize).collect()
    }

    #[inline]
    pub fn owner(&self, v: u32) -> usize {
        self.starts.partition_point(|&s| s <= v) - 1
    }
}

#[derive(Debug, Clone, Copy)]
struct Nbr {
    v: u32,
    rank: u32,
    color: u8,
}

/// State resident on one worker.
#[derive(Debug)]
struct Worker {
    lo: u32,
    ranks: Vec<u32>,
    colors: Vec<u8>,
    adj: Vec<Vec<Nbr>>,
}

impl Worker {
    fn rank(&self, v: u32) -> u32 {
        self.ranks[(v - self.lo) as usize]
    }

    fn color(&self, v: u32) -> u8 {
        self.colors[(v - self.lo) as usize]
    }

    fn neighbors(&self, v: u32) -> &[Nbr] {
        &self.adj[(v - self.lo) as usize]
    }

    fn owned(&self) -> Range<u32> {
        self.lo..self.lo + self.ranks.len() as u32
    }
}

/// Count plus the ranks of the leading vertex and of the recorded slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Val {
    count: u64,
    ranks: [u32; 3],
}

type Shard = FxHashMap<EntryKey, Val>;

/// A table spread over workers, one shard each.
#[derive(Debug, Clone)]
pub struct ShardedTable {
    arity: usize,
    recorded: usize,
    shards: Vec<Shard>,
}

impl ShardedTable {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of entries resident on each worker.
    pub fn shard_sizes(&self) -> Vec<usize> {
        self.shards.iter().map(|s| s.len()).collect()
    }

    /// All entries with their counts, sorted.
    pub fn entries(&self) -> Vec<(EntryKey, u64)> {
        let mut v: Vec<_> = self.shards.iter().flat_map(|s| s.iter().map(|(k, v)| (*k, v.count))).collect();
        v.sort_unstable();
        v
    }
}

struct Outbox<'p> {
    part: &'p Partition,
    buffers: Vec<Vec<(EntryKey, Val)>>,
    ops: u64,
}

impl Outbox<'_> {
    fn send_to(&mut self, worker: usize, key: EntryKey, val: Val) {
        self.buffers[worker].push((key, val));
    }

    fn send(&mut self, owner_of: u32, key: EntryKey, val: Val) {
        let w = self.part.owner(owner_of);
        self.send_to(w, key, val);
    }

    /// Sends a join output and counts it as one operation.
    fn emit(&mut self, owner_of: u32, key: EntryKey, val: Val) {
        self.ops += 1;
        self.send(owner_of, key, val);
    }
}

fn mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or(Error::Overflow("count product"))
}

fn trailing(key: &EntryKey, arity: usize) -> Option<u32> {
    match arity {
        2 => Some(key.verts[1]),
        1 => Some(key.verts[0]),
        _ => None,
    }
}

/// Backend running every join as bulk-synchronous rounds over workers.
#[derive(Debug)]
pub struct PartitionedJoiner {
    part: Partition,
    workers: Vec<Worker>,
    ops: Vec<u64>,
    rounds: u64,
}

impl PartitionedJoiner {
    /// Distributes adjacency, ranks and colors to the owning workers.
    pub fn new(g: &DataGraph, chi: &Coloring, order: &VertexOrdering, part: Partition) -> Result<Self> {
        if part.n() != g.n() || chi.len() != g.n() {
            return Err(Error::InvalidArgument("partition, coloring and graph sizes differ".into()));
        }
        let workers = (0..part.p())
            .map(|w| {
                let r = part.range(w);
                Worker {
                    lo: r.start,
                    ranks: r.clone().map(|v| order.rank(v)).collect(),
                    colors: r.clone().map(|v| chi.color(v)).collect(),
                    adj: r
                        .map(|v| {
                            g.neighbors(v)
                                .iter()
                                .map(|&u| Nbr { v: u, rank: order.rank(u), color: chi.color(u) })
                                .collect()
                        })
                        .collect(),
                }
            })
            .collect();
        Ok(PartitionedJoiner { ops: vec![0; part.p()], part, workers, rounds: 0 })
    }

    pub fn partition(&self) -> &Partition {
        &self.part
    }

    pub fn per_worker_ops(&self) -> &[u64] {
        &self.ops
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Runs `f` on every worker, then delivers all buffered entries.
    fn round<F>(&mut self, f: F) -> Result<Vec<Shard>>
    where
        F: Fn(usize, &Worker, &mut Outbox<'_>) -> Result<()> + Sync,
    {
        let part = &self.part;
        let outboxes = self
            .workers
            .par_iter()
            .enumerate()
            .map(|(w, worker)| {
                let mut out = Outbox { part, buffers: vec![Vec::new(); part.p()], ops: 0 };
                f(w, worker, &mut out)?;
                Ok((out.buffers, out.ops))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut by_dest: Vec<Vec<Vec<(EntryKey, Val)>>> = (0..part.p()).map(|_| Vec::new()).collect();
        for (w, (buffers, ops)) in outboxes.into_iter().enumerate() {
            self.ops[w] += ops;
            for (d, buf) in buffers.into_iter().enumerate() {
                by_dest[d].push(buf);
            }
        }
        self.rounds += 1;
        by_dest
            .into_par_iter()
            .map(|incoming| {
                let mut shard = Shard::default();
                for (key, val) in incoming.into_iter().flatten() {
                    let slot = shard.entry(key).or_insert(Val { count: 0, ranks: val.ranks });
                    slot.count = slot.count.checked_add(val.count).ok_or(Error::Overflow("table accumulation"))?;
                }
                Ok(shard)
            })
            .collect()
    }

    fn sealed(&self, arity: usize, recorded: usize, shards: Vec<Shard>) -> ShardedTable {
        let t = ShardedTable { arity, recorded, shards };
        self.debug_check_ownership(&t);
        t
    }

    fn debug_check_ownership(&self, t: &ShardedTable) {
        if cfg!(debug_assertions) {
            for (w, shard) in t.shards.iter().enumerate() {
                for key in shard.keys() {
                    if let Some(v) = trailing(key, t.arity) {
                        assert_eq!(self.part.owner(v), w, "entry {key:?} resident on worker {w}");
                    }
                }
            }
        }
    }

    fn check_binary(t: &ShardedTable, what: &str) -> Result<()> {
        if t.arity != 2 {
            return Err(Error::Schema(format!("{what} needs a binary table, got arity {}", t.arity)));
        }
        Ok(())
    }

    fn recorded_after(t_recorded: usize, record: Option<usize>) -> Result<usize> {
        match record {
            Some(_) if t_recorded == 2 => Err(Error::Schema("no free recorded slot".into())),
            Some(_) => Ok(t_recorded + 1),
            None => Ok(t_recorded),
        }
    }

    /// Ships every entry of a binary table to the owner of its leading vertex.
    fn ship_to_lead(&mut self, t: &ShardedTable) -> Result<Vec<Shard>> {
        self.round(|w, _, out| {
            for (k, v) in &t.shards[w] {
                out.send(k.verts[0], *k, *v);
            }
            Ok(())
        })
    }
}

fn with_slot(key: EntryKey, val: Val, idx: usize, w: u32, rank_w: u32) -> (EntryKey, Val) {
    let mut key = key;
    let mut val = val;
    key.slots[idx] = w;
    val.ranks[1 + idx] = rank_w;
    (key, val)
}

impl JoinBackend for PartitionedJoiner {
    type Table = ShardedTable;

    fn vertex_count(&self) -> usize {
        self.part.n()
    }

    fn seed(&mut self, first: EdgeSource<'_, ShardedTable>, cap: bool, record: Option<usize>) -> Result<ShardedTable> {
        let recorded = Self::recorded_after(0, record)?;
        let shards = match first {
            EdgeSource::Graph => self.round(|_, worker, out| {
                for v in worker.owned() {
                    let (cv, rv) = (worker.color(v), worker.rank(v));
                    for n in worker.neighbors(v) {
                        if n.color == cv || (cap && n.rank <= rv) {
                            continue;
                        }
                        let key = EntryKey::binary(n.v, v, Signature::of_color(n.color).with(cv));
                        let val = Val { count: 1, ranks: [n.rank, NO_VERTEX, NO_VERTEX] };
                        let (key, val) = if record.is_some() { with_slot(key, val, 0, v, rv) } else { (key, val) };
                        out.emit(v, key, val);
                    }
                }
                Ok(())
            })?,
            EdgeSource::Table(t) => {
                Self::check_binary(t, "seed")?;
                if t.recorded != 0 {
                    return Err(Error::Schema("seed table already has recorded slots".into()));
                }
                self.round(|w, worker, out| {
                    for (k, val) in &t.shards[w] {
                        let v = k.verts[1];
                        if cap && val.ranks[0] <= worker.rank(v) {
                            continue;
                        }
                        let (key, val) =
                            if record.is_some() { with_slot(*k, *val, 0, v, worker.rank(v)) } else { (*k, *val) };
                        out.emit(v, key, val);
                    }
                    Ok(())
                })?
            }
        };
        Ok(self.sealed(2, recorded, shards))
    }

    fn edge_join(
        &mut self,
        t: &ShardedTable,
        right: EdgeSource<'_, ShardedTable>,
        cap: bool,
        record: Option<usize>,
    ) -> Result<ShardedTable> {
        Self::check_binary(t, "edge_join")?;
        let recorded = Self::recorded_after(t.recorded, record)?;
        let idx = t.recorded;
        let shards = match right {
            EdgeSource::Graph => self.round(|w, worker, out| {
                for (k, val) in &t.shards[w] {
                    let v = k.verts[1];
                    for n in worker.neighbors(v) {
                        if k.sig.contains(n.color) || (cap && val.ranks[0] <= n.rank) {
                            continue;
                        }
                        let key = EntryKey { verts: [k.verts[0], n.v], slots: k.slots, sig: k.sig.with(n.color) };
                        let (key, val) =
                            if record.is_some() { with_slot(key, *val, idx, n.v, n.rank) } else { (key, *val) };
                        out.emit(n.v, key, val);
                    }
                }
                Ok(())
            })?,
            EdgeSource::Table(r) => {
                Self::check_binary(r, "edge_join right side")?;
                if r.recorded != 0 {
                    return Err(Error::Schema("edge_join right side has recorded slots".into()));
                }
                // Right entries (v, w) move from owner(w) to owner(v), carrying rank(w).
                let shipped = self.round(|w, worker, out| {
                    for (k, val) in &r.shards[w] {
                        let ranks = [val.ranks[0], worker.rank(k.verts[1]), NO_VERTEX];
                        out.send(k.verts[0], *k, Val { count: val.count, ranks });
                    }
                    Ok(())
                })?;
                let shards = self.round(|w, worker, out| {
                    let mut index: FxHashMap<u32, Vec<(u32, Signature, Val)>> = FxHashMap::default();
                    for (k, val) in &shipped[w] {
                        index.entry(k.verts[0]).or_default().push((k.verts[1], k.sig, *val));
                    }
                    for (k, val) in &t.shards[w] {
                        let v = k.verts[1];
                        let Some(ext) = index.get(&v) else { continue };
                        let cv = Signature::of_color(worker.color(v));
                        for &(x, sig2, rval) in ext {
                            let rank_x = rval.ranks[1];
                            if k.sig.intersection(sig2) != cv || (cap && val.ranks[0] <= rank_x) {
                                continue;
                            }
                            let key = EntryKey { verts: [k.verts[0], x], slots: k.slots, sig: k.sig.union(sig2) };
                            let v2 = Val { count: mul(val.count, rval.count)?, ranks: val.ranks };
                            let (key, v2) =
                                if record.is_some() { with_slot(key, v2, idx, x, rank_x) } else { (key, v2) };
                            out.emit(x, key, v2);
                        }
                    }
                    Ok(())
                })?;
                shards
            }
        };
        Ok(self.sealed(2, recorded, shards))
    }

    fn node_join(&mut self, t: &ShardedTable, unary: &ShardedTable, side: Side) -> Result<ShardedTable> {
        Self::check_binary(t, "node_join")?;
        if unary.arity != 1 || unary.recorded != 0 {
            return Err(Error::Schema("node_join needs a plain unary table".into()));
        }
        let pos = match side {
            Side::Leading => 0,
            Side::Trailing => 1,
        };
        let local = match side {
            Side::Trailing => None,
            Side::Leading => Some(self.ship_to_lead(t)?),
        };
        let shards = self.round(|w, worker, out| {
            let mut index: FxHashMap<u32, Vec<(Signature, u64)>> = FxHashMap::default();
            for (k, val) in &unary.shards[w] {
                index.entry(k.verts[0]).or_default().push((k.sig, val.count));
            }
            let resident = local.as_ref().map_or(&t.shards[w], |s| &s[w]);
            for (k, val) in resident {
                let x = k.verts[pos];
                let Some(ext) = index.get(&x) else { continue };
                let cx = Signature::of_color(worker.color(x));
                for &(sig2, c2) in ext {
                    if k.sig.intersection(sig2) != cx {
                        continue;
                    }
                    let key = EntryKey { sig: k.sig.union(sig2), ..*k };
                    out.emit(k.verts[1], key, Val { count: mul(val.count, c2)?, ranks: val.ranks });
                }
            }
            Ok(())
        })?;
        Ok(self.sealed(2, t.recorded, shards))
    }

    fn merge_halves(
        &mut self,
        plus: &ShardedTable,
        minus: &ShardedTable,
        out_src: &[SlotSource],
    ) -> Result<ShardedTable> {
        Self::check_binary(plus, "merge_halves")?;
        Self::check_binary(minus, "merge_halves")?;
        if out_src.len() > 2 {
            return Err(Error::Schema("merge output has at most two key vertices".into()));
        }
        for s in out_src {
            let ok = match *s {
                SlotSource::Plus(i) => i < plus.recorded,
                SlotSource::Minus(i) => i < minus.recorded,
                _ => true,
            };
            if !ok {
                return Err(Error::Schema(format!("merge output refers to missing slot {s:?}")));
            }
        }
        let arity = out_src.len();
        let shards = self.round(|w, worker, out| {
            let mut index: FxHashMap<(u32, u32), Vec<(EntryKey, Val)>> = FxHashMap::default();
            for (k, val) in &minus.shards[w] {
                index.entry((k.verts[0], k.verts[1])).or_default().push((*k, *val));
            }
            for (k, val) in &plus.shards[w] {
                let (u, v) = (k.verts[0], k.verts[1]);
                let Some(matches) = index.get(&(u, v)) else { continue };
                let cv = worker.color(v);
                for (mk, mval) in matches {
                    // Both signatures contain chi(u) and chi(v).
                    let inter = k.sig.intersection(mk.sig);
                    if inter.len() != 2 || !inter.contains(cv) {
                        continue;
                    }
                    let mut verts = [NO_VERTEX; 2];
                    let mut lead_rank = NO_VERTEX;
                    for (i, s) in out_src.iter().enumerate() {
                        let (x, rank) = match *s {
                            SlotSource::Lead => (u, val.ranks[0]),
                            SlotSource::Trail => (v, worker.rank(v)),
                            SlotSource::Plus(j) => (k.slots[j], val.ranks[1 + j]),
                            SlotSource::Minus(j) => (mk.slots[j], mval.ranks[1 + j]),
                        };
                        verts[i] = x;
                        if i == 0 {
                            lead_rank = rank;
                        }
                    }
                    let key = EntryKey { verts, slots: [NO_VERTEX; 2], sig: k.sig.union(mk.sig) };
                    let val2 = Val { count: mul(val.count, mval.count)?, ranks: [lead_rank, NO_VERTEX, NO_VERTEX] };
                    match trailing(&key, arity) {
                        Some(dest) => out.emit(dest, key, val2),
                        None => {
                            out.ops += 1;
                            out.send_to(w, key, val2);
                        }
                    }
                }
            }
            Ok(())
        })?;
        Ok(self.sealed(arity, 0, shards))
    }

    fn transpose(&mut self, t: &ShardedTable) -> Result<ShardedTable> {
        Self::check_binary(t, "transpose")?;
        let shards = self.round(|w, worker, out| {
            for (k, val) in &t.shards[w] {
                let (u, v) = (k.verts[0], k.verts[1]);
                let key = EntryKey { verts: [v, u], ..*k };
                let mut ranks = val.ranks;
                ranks[0] = worker.rank(v);
                out.send(u, key, Val { count: val.count, ranks });
            }
            Ok(())
        })?;
        Ok(self.sealed(2, t.recorded, shards))
    }

    fn project_leading(&mut self, t: &ShardedTable) -> Result<ShardedTable> {
        Self::check_binary(t, "project_leading")?;
        if t.recorded != 0 {
            return Err(Error::Schema("projection needs a binary table without recorded slots".into()));
        }
        let shards = self.round(|w, _, out| {
            for (k, val) in &t.shards[w] {
                let key = EntryKey::unary(k.verts[0], k.sig);
                out.emit(k.verts[0], key, Val { count: val.count, ranks: [NO_VERTEX; 3] });
            }
            Ok(())
        })?;
        Ok(self.sealed(1, 0, shards))
    }

    fn empty(&mut self, arity: usize) -> ShardedTable {
        ShardedTable { arity, recorded: 0, shards: vec![Shard::default(); self.part.p()] }
    }

    fn accumulate(&mut self, acc: &mut ShardedTable, t: &ShardedTable) -> Result<()> {
        if acc.arity != t.arity || acc.recorded != t.recorded {
            return Err(Error::Schema("cannot add tables with different key layouts".into()));
        }
        acc.shards.par_iter_mut().zip(&t.shards).try_for_each(|(a, s)| {
            for (k, v) in s {
                let slot = a.entry(*k).or_insert(Val { count: 0, ranks: v.ranks });
                slot.count = slot.count.checked_add(v.count).ok_or(Error::Overflow("table accumulation"))?;
            }
            Ok(())
        })
    }

    fn total(&mut self, t: &ShardedTable) -> Result<u64> {
        let partial: Vec<u64> = t
            .shards
            .par_iter()
            .map(|s| s.values().try_fold(0u64, |a, v| a.checked_add(v.count)).ok_or(Error::Overflow("table total")))
            .collect::<Result<_>>()?;
        partial.into_iter().try_fold(0u64, |a, x| a.checked_add(x)).ok_or(Error::Overflow("table total"))
    }
}

/// Per-run load summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadReport {
    pub p: usize,
    pub per_worker_ops: Vec<u64>,
    pub max_ops: u64,
    pub avg_ops: f64,
    pub wall_time: f64,
}

impl LoadReport {
    pub fn new(per_worker_ops: Vec<u64>, wall_time: f64) -> Self {
        let p = per_worker_ops.len();
        let max_ops = per_worker_ops.iter().copied().max().unwrap_or(0);
        let avg_ops = per_worker_ops.iter().sum::<u64>() as f64 / p.max(1) as f64;
        LoadReport { p, per_worker_ops, max_ops, avg_ops, wall_time }
    }

    /// Maximum over average load; 1 for a perfectly even split.
    pub fn imbalance(&self) -> f64 {
        if self.avg_ops == 0.0 {
            1.0
        } else {
            self.max_ops as f64 / self.avg_ops
        }
    }
}

pub fn parallel_count_with_report(
    g: &DataGraph,
    chi: &Coloring,
    order: &VertexOrdering,
    tree: &DecompositionTree,
    kind: EngineKind,
    part: &Partition,
) -> Result<(u64, LoadReport)> {
    if chi.k() < tree.query().k() {
        return Err(Error::InvalidArgument(format!(
            "{} colors cannot color a {}-node query",
            chi.k(),
            tree.query().k()
        )));
    }
    let start = Instant::now();
    let mut engine = Engine::new(PartitionedJoiner::new(g, chi, order, part.clone())?, kind);
    let count = engine.count(tree)?;
    let ops = engine.into_backend().ops;
    Ok((count, LoadReport::new(ops, start.elapsed().as_secs_f64())))
}

/// Colorful-match count computed on `part.p()` workers.
pub fn parallel_count(
    g: &DataGraph,
    chi: &Coloring,
    tree: &DecompositionTree,
    kind: EngineKind,
    part: &Partition,
) -> Result<u64> {
    let order = crate::graph::degree_rank(g);
    Ok(parallel_count_with_report(g, chi, &order, tree, kind, part)?.0)
}
