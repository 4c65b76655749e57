//! Fixed, seeded workloads shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qgd_core::blockcalc::sample::random_encoding;
use qgd_core::descent::resources::synthetic_objective;
use qgd_core::{BlockEncoding, NamedFunction, ObjectiveFunction, ScalarFunction, SeparableObjective};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Iterate of `n` coordinates spread over `[-0.2, 0.2]`.
pub fn iterate(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if n == 1 { 0.1 } else { -0.2 + 0.4 * i as f64 / (n - 1) as f64 })
        .collect()
}

/// `count` random `dim x dim` contractions of norm 0.9.
pub fn encodings(count: usize, dim: usize, seed: u64) -> Vec<BlockEncoding> {
    let mut r = rng(seed);
    (0..count).map(|_| random_encoding(&mut r, dim, 0.9)).collect()
}

/// Homogeneous family: `k` terms of degree `d` in `v` of `n` variables.
pub fn generic_family(n: usize, k: usize, d: u32, v: usize) -> ObjectiveFunction {
    synthetic_objective(n, k, d, v).expect("family parameters are admissible")
}

pub fn sine(n: usize) -> SeparableObjective {
    SeparableObjective::new(n, ScalarFunction::named(NamedFunction::Sin, 1.0), 1.0)
        .expect("sin with M = 1 is admissible")
}
