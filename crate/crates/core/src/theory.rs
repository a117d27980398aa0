//! Chung-Lu random graphs and path statistics comparing degree-ordered and
//! id-ordered path enumeration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DataGraph, VertexOrdering};

/// Largest vertex count accepted by [`sample_chung_lu`].
pub const MAX_CHUNG_LU_N: usize = 1 << 15;

/// Truncated power-law degree sequence: for each `j` in `1..=⌊½·log₂ n⌋`,
/// `⌈c·n / 2^(αj)⌉` vertices of degree `2^j`, where `c = 1 / Σ_{j≥0} 2^(-αj)`.
/// All other vertices get degree 1 (the `j = 0` bucket). The sequence is
/// shuffled with `seed`.
pub fn power_law_degrees(n: usize, alpha: f64, seed: u64) -> Result<Vec<u32>> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidSpec(format!("alpha {alpha} outside (1, 2)")));
    }
    if n < 4 {
        return Err(Error::InvalidSpec(format!("n = {n} is below 4")));
    }
    let jmax = ((n as f64).log2() / 2.0).floor() as u32;
    let c = 1.0 / (0..=jmax).map(|j| 2f64.powf(-alpha * j as f64)).sum::<f64>();
    let mut degrees = Vec::with_capacity(n);
    for j in (1..=jmax).rev() {
        let size = (c * n as f64 / 2f64.powf(alpha * j as f64)).ceil() as usize;
        let size = size.min(n - degrees.len());
        degrees.extend(std::iter::repeat_n(1u32 << j, size));
    }
    degrees.resize(n, 1);
    degrees.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(degrees)
}

/// Expected-degree sequence for the Chung-Lu model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChungLuSpec {
    degrees: Vec<f64>,
}

impl ChungLuSpec {
    /// Requires every weight to be finite and at least 1, and the largest to
    /// be at most `√n`.
    pub fn new(degrees: Vec<f64>) -> Result<Self> {
        let n = degrees.len();
        if n == 0 || n > MAX_CHUNG_LU_N {
            return Err(Error::InvalidSpec(format!("n = {n} outside 1..={MAX_CHUNG_LU_N}")));
        }
        if let Some(d) = degrees.iter().find(|d| !d.is_finite() || **d < 1.0) {
            return Err(Error::InvalidSpec(format!("degree {d} is below 1")));
        }
        let max = degrees.iter().cloned().fold(0.0, f64::max);
        if max > (n as f64).sqrt() + 1e-9 {
            return Err(Error::InvalidSpec(format!("max degree {max} exceeds sqrt(n) = {}", (n as f64).sqrt())));
        }
        Ok(ChungLuSpec { degrees })
    }

    pub fn from_integers(degrees: &[u32]) -> Result<Self> {
        Self::new(degrees.iter().map(|&d| d as f64).collect())
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Half the degree sum.
    pub fn m(&self) -> f64 {
        self.degrees.iter().sum::<f64>() / 2.0
    }

    /// Whether `m ≥ n`, the density assumption of the asymptotic analysis.
    pub fn is_dense_enough(&self) -> bool {
        self.m() >= self.n() as f64
    }

    pub fn edge_probability(&self, u: usize, v: usize) -> f64 {
        (self.degrees[u] * self.degrees[v] / (2.0 * self.m())).min(1.0)
    }
}

/// Samples each unordered pair `{u, v}` independently with probability
/// `min(1, d_u·d_v / 2m)`. Vertices with equal weights are grouped and the
/// pairs of each group pair are visited by geometric skipping, which gives
/// the same distribution as testing every pair.
pub fn sample_chung_lu(spec: &ChungLuSpec, seed: u64) -> DataGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (v, d) in spec.degrees.iter().enumerate() {
        groups.entry(d.to_bits()).or_default().push(v as u32);
    }
    let groups: Vec<(f64, Vec<u32>)> = groups.into_iter().map(|(b, vs)| (f64::from_bits(b), vs)).collect();
    let two_m = 2.0 * spec.m();
    let mut edges = Vec::new();
    for i in 0..groups.len() {
        for j in i..groups.len() {
            let (di, a) = &groups[i];
            let (dj, b) = &groups[j];
            let p = (di * dj / two_m).min(1.0);
            // Ordered index space a × b; within one group only a < b is kept.
            let total = a.len() as u64 * b.len() as u64;
            let mut emit = |t: u64| {
                let (x, y) = (a[(t / b.len() as u64) as usize], b[(t % b.len() as u64) as usize]);
                if i != j || x < y {
                    edges.push((x, y));
                }
            };
            if p >= 1.0 {
                (0..total).for_each(&mut emit);
                continue;
            }
            if p <= 0.0 {
                continue;
            }
            let log_q = (1.0 - p).ln();
            let mut t: u64 = 0;
            loop {
                let u: f64 = rng.gen();
                let skip = ((1.0 - u).ln() / log_q).floor();
                if skip >= (total - t) as f64 {
                    break;
                }
                t += skip as u64;
                emit(t);
                t += 1;
                if t >= total {
                    break;
                }
            }
        }
    }
    DataGraph::from_edges(spec.n(), &edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Balance {
    pub a: u32,
    pub b: u32,
    pub lambda: f64,
}

/// `λ(a, b) = Σ d^(a+b) / (Σ d^a · Σ d^b)` for `1 ≤ a ≤ a_max`, `1 ≤ b ≤ b_max`.
pub fn check_balanced(d: &[f64], a_max: u32, b_max: u32) -> Vec<Balance> {
    let power_sum = |e: u32| d.iter().map(|x| x.powi(e as i32)).sum::<f64>();
    let mut out = Vec::new();
    for a in 1..=a_max {
        for b in 1..=b_max {
            out.push(Balance { a, b, lambda: power_sum(a + b) / (power_sum(a) * power_sum(b)) });
        }
    }
    out
}

/// Counts of directed simple paths on `q` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathStats {
    pub q: usize,
    /// Paths whose first vertex outranks the others in the degree ordering.
    pub x: u64,
    /// Paths whose first vertex has the largest permuted id.
    pub y: u64,
    pub total: u64,
}

/// A uniformly random permutation of `0..n`, used as relabeled ids.
pub fn random_permutation(n: usize, seed: u64) -> Vec<u32> {
    let mut p: Vec<u32> = (0..n as u32).collect();
    p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    p
}

/// Enumerates every directed simple path on `q` vertices. `id_perm[v]` is
/// the relabeled id of `v`. Fails once more than `budget` path prefixes have
/// been extended.
pub fn path_stats(
    g: &DataGraph,
    q: usize,
    ordering: &VertexOrdering,
    id_perm: &[u32],
    budget: u64,
) -> Result<PathStats> {
    if q < 2 {
        return Err(Error::InvalidArgument("paths need at least two vertices".into()));
    }
    if id_perm.len() != g.n() {
        return Err(Error::InvalidArgument("id permutation length differs from n".into()));
    }
    struct Walk<'a> {
        g: &'a DataGraph,
        q: usize,
        on_path: Vec<bool>,
        explored: u64,
        budget: u64,
        stats: PathStats,
    }
    impl Walk<'_> {
        // `top_rank` and `top_id` are maxima over the path after its start.
        fn go(
            &mut self,
            v: u32,
            len: usize,
            start: (u32, u32),
            top: (u32, u32),
            ord: &VertexOrdering,
            perm: &[u32],
        ) -> Result<()> {
            if len == self.q {
                self.stats.total += 1;
                self.stats.x += (start.0 > top.0) as u64;
                self.stats.y += (start.1 > top.1) as u64;
                return Ok(());
            }
            for &w in self.g.neighbors(v) {
                if self.on_path[w as usize] {
                    continue;
                }
                self.explored += 1;
                if self.explored > self.budget {
                    return Err(Error::Budget { budget: self.budget, explored: self.explored - 1 });
                }
                self.on_path[w as usize] = true;
                let next = (top.0.max(ord.rank(w)), top.1.max(perm[w as usize]));
                self.go(w, len + 1, start, next, ord, perm)?;
                self.on_path[w as usize] = false;
            }
            Ok(())
        }
    }
    let mut walk =
        Walk { g, q, on_path: vec![false; g.n()], explored: 0, budget, stats: PathStats { q, x: 0, y: 0, total: 0 } };
    for u in 0..g.n() as u32 {
        walk.on_path[u as usize] = true;
        walk.go(u, 1, (ordering.rank(u), id_perm[u as usize]), (0, 0), ordering, id_perm)?;
        walk.on_path[u as usize] = false;
    }
    Ok(walk.stats)
}

/// One row of path-statistics output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathStatsRow {
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
    pub q: usize,
    pub x: u64,
    pub y: u64,
    /// `Y / X`; infinite when `X = 0`.
    pub ratio: f64,
}

impl PathStatsRow {
    pub fn new(n: usize, alpha: f64, seed: u64, stats: &PathStats) -> Self {
        let ratio = if stats.x == 0 { f64::INFINITY } else { stats.y as f64 / stats.x as f64 };
        PathStatsRow { n, alpha, seed, q: stats.q, x: stats.x, y: stats.y, ratio }
    }
}

pub const CSV_HEADER: &str = "n,alpha,seed,q,X,Y,ratio";

pub fn to_csv(rows: &[PathStatsRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{},{}", r.n, r.alpha, r.seed, r.q, r.x, r.y, r.ratio);
    }
    out
}

/// Samples a power-law Chung-Lu graph and measures its path statistics under
/// a random id permutation derived from the same seed.
pub fn chung_lu_path_row(n: usize, alpha: f64, seed: u64, q: usize, budget: u64) -> Result<PathStatsRow> {
    let spec = ChungLuSpec::from_integers(&power_law_degrees(n, alpha, seed)?)?;
    let g = sample_chung_lu(&spec, seed);
    let order = crate::graph::degree_rank(&g);
    let perm = random_permutation(n, seed ^ 0x9e37_79b9_7f4a_7c15);
    Ok(PathStatsRow::new(n, alpha, seed, &path_stats(&g, q, &order, &perm, budget)?))
}
