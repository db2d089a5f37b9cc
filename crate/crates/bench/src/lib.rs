//! Shared input generators for the benchmark targets.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polarwin_core::polar::{self, CodeSpec};

/// A constructed N=1024, rate-1/2 code (fixed seed, small trial budget —
/// benchmarks need a realistic shape, not an optimal code).
pub fn bench_code() -> CodeSpec {
    let (spec, _) = polar::construct_code_monte_carlo(10, 512, 0.5, 2_000, 42).unwrap();
    spec
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A noisy received vector for the all-zero codeword at `sigma2`.
pub fn received(n: usize, sigma2: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| 1.0 + sigma2.sqrt() * rng.random_range(-3.0..3.0))
        .collect()
}

/// Non-negative residual-like samples with piecewise structure.
pub fn residuals(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(n);
    let mut level = 0.5f64;
    for i in 0..n {
        if i % 64 == 0 {
            level = [0.05, 0.6, 1.2][rng.random_range(0..3)];
        }
        let eps: f64 = rng.random_range(-0.5..0.5);
        out.push((level + eps * level).max(0.0));
    }
    out
}
