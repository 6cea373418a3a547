//! Seeded, thread-count-independent Monte Carlo plumbing.
//!
//! Samples are split into fixed-size chunks. Chunk `i` draws from the ChaCha
//! stream `i` of the master seed, and chunk results are merged in index
//! order, so estimates are bit-identical for any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const CHUNK_SIZE: u64 = 4096;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `body(rng, count)` on every chunk in parallel and returns the chunk
/// results in chunk order.
pub fn run_chunks<T, F>(n_samples: u64, seed: u64, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = n_samples.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK_SIZE.min(n_samples - c * CHUNK_SIZE);
            body(&mut chunk_rng(seed, c), count)
        })
        .collect()
}

/// Runs `f` inside a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Streaming mean/variance (Welford) with an order-respecting merge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn report(&self, seed: u64) -> EstimatorReport {
        EstimatorReport::new(self.mean, self.sample_variance(), self.count, seed)
    }
}

/// Merge a sequence of per-chunk moments in order.
pub fn merge_all<'a>(parts: impl IntoIterator<Item = &'a Moments>) -> Moments {
    let mut acc = Moments::default();
    for p in parts {
        acc.merge(p);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorReport {
    pub estimate: f64,
    pub sample_variance: f64,
    pub standard_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub ci_level: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EstimatorReport {
    pub fn new(estimate: f64, sample_variance: f64, n_samples: u64, seed: u64) -> Self {
        let standard_error = if n_samples == 0 {
            f64::INFINITY
        } else {
            (sample_variance / n_samples as f64).sqrt()
        };
        Self {
            estimate,
            sample_variance,
            standard_error,
            n_samples,
            seed,
            ci_level: 0.95,
            ci_low: estimate - Z95 * standard_error,
            ci_high: estimate + Z95 * standard_error,
        }
    }

    /// `|estimate - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.estimate - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.standard_error
        }
    }

    pub fn within_sigmas(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) <= sigmas
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.count, whole.count);
        assert!((a.mean - whole.mean).abs() < 1e-12);
        assert!((a.sample_variance() - whole.sample_variance()).abs() < 1e-10);
    }

    #[test]
    fn standard_error_definition() {
        let r = EstimatorReport::new(1.0, 4.0, 100, 0);
        assert_eq!(r.standard_error, 0.2);
        assert!(r.ci_low < 1.0 && r.ci_high > 1.0);
    }

    #[test]
    fn chunked_runs_are_thread_count_independent() {
        let run = |threads| {
            with_threads(threads, || {
                let parts = run_chunks(20_000, 42, |rng, count| {
                    let mut m = Moments::default();
                    for _ in 0..count {
                        m.push(rng.random::<f64>());
                    }
                    m
                });
                merge_all(&parts)
            })
            .unwrap()
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one, four);
        assert_eq!(one.count, 20_000);
    }
}
