//! Color-coding estimates: repeated random colorings, colorful counts, and
//! their normalization into match and subgraph estimates.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{count_with_order, EngineKind};
use crate::error::{Error, Result};
use crate::graph::{coloring_from_rng, degree_rank, Coloring, DataGraph, MAX_COLORS};
use crate::planner::DecompositionTree;
use crate::query::QueryGraph;

/// Largest query for which automorphisms are enumerated.
pub const MAX_AUT_NODES: usize = 10;

/// Number of node permutations of `q` that preserve adjacency.
pub fn automorphism_count(q: &QueryGraph) -> Result<u64> {
    let k = q.k();
    if k > MAX_AUT_NODES {
        return Err(Error::TooLargeForAutomorphisms(k));
    }
    fn extend(q: &QueryGraph, image: &mut Vec<usize>, used: u32) -> u64 {
        let a = image.len();
        if a == q.k() {
            return 1;
        }
        let mut total = 0;
        for x in 0..q.k() {
            if used & (1 << x) != 0 || q.degree(x) != q.degree(a) {
                continue;
            }
            if (0..a).all(|b| q.has_edge(a, b) == q.has_edge(x, image[b])) {
                image.push(x);
                total += extend(q, image, used | (1 << x));
                image.pop();
            }
        }
        total
    }
    Ok(extend(q, &mut Vec::with_capacity(k), 0))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Inverse probability that a fixed match of a `q_nodes`-node query is
/// colorful under `colors` colors: `colors^q (colors-q)! / colors!`, which is
/// `k^k / k!` when the two agree.
pub fn normalizer(colors: usize, q_nodes: usize) -> Result<BigRational> {
    if colors == 0 || colors > MAX_COLORS {
        return Err(Error::UnsupportedColors(colors));
    }
    if colors < q_nodes {
        return Err(Error::InvalidArgument(format!("{colors} colors cannot color {q_nodes} query nodes")));
    }
    let num = BigInt::from(colors).pow(q_nodes as u32) * factorial(colors - q_nodes);
    Ok(BigRational::new(num, factorial(colors)))
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// Coloring for trial `trial`: ChaCha8 seeded with `seed`, on stream `trial`.
pub fn trial_coloring(n: usize, k: usize, seed: u64, trial: u64) -> Result<Coloring> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    coloring_from_rng(n, k, &mut rng)
}

/// Population variance over mean, computed exactly. Zero for fewer than two
/// values or a zero mean.
pub fn coefficient_of_variation(xs: &[u64]) -> f64 {
    let n = BigInt::from(xs.len());
    let sum: BigInt = xs.iter().map(|&x| BigInt::from(x)).sum();
    if xs.len() < 2 || sum.is_zero() {
        return 0.0;
    }
    let sum_sq: BigInt = xs.iter().map(|&x| BigInt::from(x) * BigInt::from(x)).sum();
    // var / mean = (n Σx² - (Σx)²) / (n Σx)
    let num = &n * sum_sq - &sum * &sum;
    ratio_to_f64(&BigRational::new(num, n * sum))
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub trials: usize,
    pub colors: usize,
    pub seed: u64,
    pub per_trial_colorful: Vec<u64>,
    pub normalized: Vec<f64>,
    pub normalizer: f64,
    /// Exact normalizer as `numerator/denominator`.
    pub normalizer_exact: String,
    pub mean_estimate: f64,
    /// Population variance over mean of the per-trial colorful counts.
    pub cv: f64,
    /// `None` when the query is too large for automorphism enumeration.
    pub aut: Option<u64>,
    pub subgraph_estimate: Option<f64>,
    pub wall_time_per_trial: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateOptions {
    pub trials: usize,
    pub seed: u64,
    /// Number of colors; defaults to the query size.
    pub colors: Option<usize>,
}

impl EstimateOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        EstimateOptions { trials, seed, colors: None }
    }
}

/// Runs `opts.trials` colorings through `count` and summarizes them. Trials
/// run in parallel; the report does not depend on scheduling.
pub fn estimate_with<F>(g: &DataGraph, q: &QueryGraph, opts: EstimateOptions, count: F) -> Result<EstimateReport>
where
    F: Fn(&Coloring) -> Result<u64> + Sync,
{
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let k = opts.colors.unwrap_or(q.k());
    let norm = normalizer(k, q.k())?;
    let aut = match automorphism_count(q) {
        Ok(a) => Some(a),
        Err(Error::TooLargeForAutomorphisms(_)) => None,
        Err(e) => return Err(e),
    };
    let start = Instant::now();
    let per_trial_colorful = (0..opts.trials as u64)
        .into_par_iter()
        .map(|t| count(&trial_coloring(g.n(), k, opts.seed, t)?))
        .collect::<Result<Vec<u64>>>()?;
    let elapsed = start.elapsed().as_secs_f64();

    let sum: BigInt = per_trial_colorful.iter().map(|&x| BigInt::from(x)).sum();
    let mean = &norm * BigRational::new(sum, BigInt::from(opts.trials));
    let mean_estimate = ratio_to_f64(&mean);
    Ok(EstimateReport {
        trials: opts.trials,
        colors: k,
        seed: opts.seed,
        normalized: per_trial_colorful
            .iter()
            .map(|&x| ratio_to_f64(&(&norm * BigRational::from_integer(BigInt::from(x)))))
            .collect(),
        cv: coefficient_of_variation(&per_trial_colorful),
        per_trial_colorful,
        normalizer: ratio_to_f64(&norm),
        normalizer_exact: format!("{}/{}", norm.numer(), norm.denom()),
        mean_estimate,
        aut,
        subgraph_estimate: aut.map(|a| ratio_to_f64(&(mean / BigRational::from_integer(BigInt::from(a))))),
        wall_time_per_trial: elapsed / opts.trials as f64,
    })
}

/// Estimate using the sequential engine.
pub fn estimate(
    g: &DataGraph,
    tree: &DecompositionTree,
    engine: EngineKind,
    opts: EstimateOptions,
) -> Result<EstimateReport> {
    let order = degree_rank(g);
    estimate_with(g, tree.query(), opts, |chi| Ok(count_with_order(g, chi, &order, tree, engine)?.count))
}
