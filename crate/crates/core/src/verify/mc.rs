//! Deterministic batched Monte Carlo.
//!
//! Batch `b` draws from ChaCha8 stream `b` of the run seed, and batch
//! statistics are merged in a fixed binary tree, so results do not depend on
//! the number of worker threads.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BATCH: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: Complex64,
    /// Standard error of `value` (real and imaginary parts combined).
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub wall_time: f64,
}

impl MCEstimate {
    pub fn exact_zero(seed: u64) -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            stderr: 0.0,
            n_samples: 0,
            seed,
            wall_time: 0.0,
        }
    }

    /// `|value − target| ≤ k · stderr`, with a floor for exact zeros.
    pub fn consistent_with(&self, target: Complex64, k: f64) -> bool {
        (self.value - target).norm() <= k * self.stderr + 1e-300
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McOptions {
    pub n: u64,
    pub seed: u64,
    /// Stops after the first wave of batches that ends past this budget.
    pub budget: Option<Duration>,
    pub threads: Option<usize>,
}

impl McOptions {
    pub fn new(n: u64, seed: u64) -> Self {
        Self { n, seed, budget: None, threads: None }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Stats {
    n: f64,
    mean: Complex64,
    m2: f64,
}

impl Stats {
    fn merge(a: Stats, b: Stats) -> Stats {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        Stats {
            n,
            mean: a.mean + delta * (b.n / n),
            m2: a.m2 + b.m2 + delta.norm_sqr() * a.n * b.n / n,
        }
    }
}

fn pairwise(stats: &[Stats]) -> Stats {
    match stats.len() {
        0 => Stats::default(),
        1 => stats[0],
        n => Stats::merge(pairwise(&stats[..n / 2]), pairwise(&stats[n / 2..])),
    }
}

fn run_batch<F>(seed: u64, batch: u64, count: u64, f: &F) -> Result<Stats>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Complex64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    let mut s = Stats::default();
    for _ in 0..count {
        let x = f(&mut rng)?;
        if !(x.re.is_finite() && x.im.is_finite()) {
            return Err(Error::Numeric(format!("non-finite sample in batch {batch}")));
        }
        s.n += 1.0;
        let delta = x - s.mean;
        s.mean += delta / s.n;
        s.m2 += (delta * (x - s.mean).conj()).re;
    }
    Ok(s)
}

/// Mean of `f` over `opts.n` samples.
pub fn estimate<F>(opts: &McOptions, f: F) -> Result<MCEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Complex64> + Sync,
{
    if opts.n == 0 {
        return Err(Error::InvalidConfig("sample count must be positive".into()));
    }
    let start = Instant::now();
    let nbatches = opts.n.div_ceil(BATCH);
    let count = |b: u64| if b + 1 == nbatches { opts.n - b * BATCH } else { BATCH };
    let threads = opts.threads.unwrap_or_else(rayon::current_num_threads).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Numeric(e.to_string()))?;
    let wave = (threads as u64 * 4).max(1);
    let mut stats = Vec::with_capacity(nbatches as usize);
    let mut next = 0;
    while next < nbatches {
        let end = if opts.budget.is_some() { (next + wave).min(nbatches) } else { nbatches };
        let chunk: Result<Vec<Stats>> = pool.install(|| {
            (next..end).into_par_iter().map(|b| run_batch(opts.seed, b, count(b), &f)).collect()
        });
        stats.extend(chunk?);
        next = end;
        if opts.budget.is_some_and(|b| start.elapsed() >= b) {
            break;
        }
    }
    let total = pairwise(&stats);
    let var = if total.n > 1.0 { total.m2 / (total.n - 1.0) } else { 0.0 };
    Ok(MCEstimate {
        value: total.mean,
        stderr: (var / total.n).sqrt(),
        n_samples: total.n as u64,
        seed: opts.seed,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
