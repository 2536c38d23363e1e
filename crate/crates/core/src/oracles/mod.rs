//! Brute-force ground truth for every completeness and soundness claim.
//!
//! All solvers enumerate exhaustively under an explicit [`Budget`] and fail
//! with [`Error::BudgetExceeded`] rather than falling back to sampling.
//! Ties are broken towards the lexicographically smallest witness.

mod biclique;
mod dalks;
mod hypergraph;
mod kcut;
mod sse;
mod unique;

pub use biclique::{solve_mbb, solve_meb, Biclique, BipartiteGraph, BipartiteJson};
pub use dalks::{solve_dalks, DalksSolution};
pub use hypergraph::{
    max_small_side_uncut, solve_muchb, uncut_fraction, Bisection, ExplicitHypergraph, HypergraphJson, MuchbSolution,
    SmallSideSolution,
};
pub use kcut::{solve_min_kcut, stirling2, Partition, SetPartitions};
pub use sse::{sse_decide, SseVerdict};
pub use unique::{random_assignment_value, ug_value};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rational::{Rational, Scaled};

/// Maximum number of enumerated states a single solve may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget(pub u128);

impl Budget {
    pub const DEFAULT: Budget = Budget(1 << 24);

    pub fn new(states: u128) -> Self {
        Budget(states)
    }

    pub fn check(&self, needed: u128) -> Result<()> {
        if needed > self.0 {
            Err(Error::BudgetExceeded { needed, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

/// Integer-scaled copy of a graph: `weight = matrix[u * n + v] / scale`.
#[derive(Debug, Clone)]
pub(crate) struct ScaledGraph {
    pub n: usize,
    pub scale: BigInt,
    pub matrix: Vec<i128>,
    pub edges: Vec<(usize, usize, i128)>,
}

impl ScaledGraph {
    pub fn new(g: &WeightedGraph) -> Result<Self> {
        let scaled = Scaled::new(g.edges().iter().map(|(_, _, w)| w))?;
        let n = g.n();
        let mut matrix = vec![0i128; n * n];
        let mut edges = Vec::with_capacity(g.edges().len());
        for ((u, v, _), w) in g.edges().iter().zip(&scaled.numerators) {
            matrix[u * n + v] = *w;
            matrix[v * n + u] = *w;
            edges.push((*u, *v, *w));
        }
        Ok(ScaledGraph {
            n,
            scale: scaled.scale,
            matrix,
            edges,
        })
    }

    pub fn w(&self, u: usize, v: usize) -> i128 {
        self.matrix[u * self.n + v]
    }

    pub fn unscale(&self, x: i128) -> Rational {
        Rational::new(BigInt::from(x), self.scale.clone())
    }

    /// Scaled weight of edges with exactly one endpoint in `mask`.
    pub fn cut_mask(&self, mask: u64) -> i128 {
        self.edges
            .iter()
            .filter(|(u, v, _)| (mask >> u & 1) != (mask >> v & 1))
            .map(|(_, _, w)| *w)
            .sum()
    }

    pub fn internal_mask(&self, mask: u64) -> i128 {
        self.edges
            .iter()
            .filter(|(u, v, _)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
            .map(|(_, _, w)| *w)
            .sum()
    }
}

pub(crate) fn require_small(n: usize, what: &str) -> Result<()> {
    if n > 63 {
        Err(Error::invalid(format!(
            "{what} enumeration supports at most 63 items, got {n}"
        )))
    } else {
        Ok(())
    }
}
