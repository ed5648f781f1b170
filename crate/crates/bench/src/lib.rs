//! Fixtures shared by the benchmarks.

use pss_core::{sample_stream, DistSpec, Item, Summary};

pub use pss_core;

/// A Zipf stream over 10^5 ranks.
pub fn zipf_stream(rho: f64, n: usize, seed: u64) -> Vec<Item> {
    sample_stream(&DistSpec::zipf(rho, 100_000, seed), n).expect("valid spec")
}

/// Two full summaries over independent halves of a skewed stream.
pub fn summary_pair(k: usize, n: usize) -> (Summary, Summary) {
    let left = Summary::from_stream(k, &zipf_stream(1.0, n, 1)).unwrap();
    let right = Summary::from_stream(k, &zipf_stream(1.0, n, 2)).unwrap();
    (left, right)
}
