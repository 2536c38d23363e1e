//! Shared fixtures for the benchmarks.

use ssered::harness::{gen_planted, PlantedSseSpec};
use ssered::rational::ratio;
use ssered::{graph::VertexSubset, WeightedGraph};

/// Planted instance with `|S| = n/4` and `Φ(S) = 1/8`.
pub fn planted(n: usize, seed: u64) -> (WeightedGraph, VertexSubset) {
    let spec = PlantedSseSpec::new(n, ratio(1, 4), ratio(1, 8), seed);
    gen_planted(&spec).expect("n divisible by 4")
}
