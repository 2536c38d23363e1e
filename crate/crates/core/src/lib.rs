//! Exact workbench for small-set-expansion hardness reductions.
//!
//! Everything in this crate computes with exact rationals. The modules map
//! onto the reduction pipeline:
//!
//! * [`graph`]: weighted regular graphs, cuts, edge expansion, tensor powers.
//! * [`oracles`]: brute-force ground truth (min k-cut, DALkS, bicliques,
//!   hypergraph bisection, unique-game value, SSE promise classification).
//! * [`reductions`]: SSE to min k-cut and DALkS, MUCHB to biclique, and
//!   biclique gap amplification by randomized graph product.
//! * [`ug`]: the SSE to unique games step and its intended assignment.
//! * [`gadget`]: the SSE to max-uncut-hypergraph-bisection gadget, its
//!   completeness bisection and the pre-asymptotic completeness audit.
//! * [`fourier`]: product-space Fourier analysis, low-degree influences,
//!   the subcube test, the soundness-side statistics and the decoder.
//! * [`harness`]: instance generators, pipelines and reports.

pub mod error;
pub mod fourier;
pub mod gadget;
pub mod graph;
pub mod harness;
pub mod oracles;
pub mod rational;
pub mod reductions;
pub mod ug;

pub use error::{Error, Result};
pub use gadget::{GadgetHypergraph, OmegaBeta, ReductionParams};
pub use graph::{SseInstance, TensorPower, VertexSubset, WeightedGraph};
pub use oracles::{BipartiteGraph, Budget, ExplicitHypergraph, Partition};
pub use rational::Rational;
pub use ug::UniqueGame;
