use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::VertexSubset;
use crate::oracles::ExplicitHypergraph;
use crate::rational::Rational;

/// An unweighted copy of a weighted hypergraph: vertex `v` becomes
/// `copies[v]` vertices and a hyperedge of normalized weight `w` becomes
/// `w · P` identical hyperedges over all copies of its members.
#[derive(Debug, Clone)]
pub struct Unweighted {
    pub hypergraph: ExplicitHypergraph,
    pub copies: Vec<usize>,
    pub edge_copies: Vec<usize>,
    offsets: Vec<usize>,
}

impl Unweighted {
    /// The copies of `v`.
    pub fn copies_of(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v] + self.copies[v]
    }

    /// Lifts `T ⊆ V` to the union of the copies of its members.
    pub fn lift(&self, t: &VertexSubset) -> Result<VertexSubset> {
        VertexSubset::from_indices(self.hypergraph.vertex_count(), t.iter().flat_map(|v| self.copies_of(v)))
    }
}

fn integer_copies(values: &[Rational], bound: &BigInt) -> Result<Vec<usize>> {
    let total: Rational = values.iter().sum();
    if total.is_zero() {
        return Err(Error::invalid("total weight is zero"));
    }
    let normalized: Vec<Rational> = values.iter().map(|v| v / &total).collect();
    let denom = normalized.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    if denom > *bound {
        return Err(Error::DenominatorTooLarge {
            needed: denom.to_string(),
            bound: bound.to_string(),
        });
    }
    normalized
        .iter()
        .map(|v| {
            (v * Rational::from_integer(denom.clone()))
                .to_integer()
                .to_usize()
                .ok_or(Error::Overflow)
        })
        .collect()
}

/// Copies vertices and hyperedges in proportion to their weights. Both
/// common denominators (after normalizing to total 1) must be at most
/// `bound`, and no hyperedge may contain a vertex of measure zero.
pub fn to_unweighted(h: &ExplicitHypergraph, bound: &BigInt) -> Result<Unweighted> {
    let copies = integer_copies(h.measures(), bound)?;
    let weights: Vec<Rational> = h.hyperedges().iter().map(|(_, w)| w.clone()).collect();
    let edge_copies = integer_copies(&weights, bound)?;
    let mut offsets = Vec::with_capacity(copies.len());
    let mut next = 0;
    for &c in &copies {
        offsets.push(next);
        next += c;
    }
    let mut edges = Vec::new();
    for ((members, _), &count) in h.hyperedges().iter().zip(&edge_copies) {
        if members.iter().any(|&v| copies[v] == 0) {
            return Err(Error::invalid(format!(
                "hyperedge {members:?} contains a vertex of measure zero"
            )));
        }
        let expanded: Vec<usize> = members
            .iter()
            .flat_map(|&v| offsets[v]..offsets[v] + copies[v])
            .collect();
        edges.extend(std::iter::repeat_n(expanded, count));
    }
    let hypergraph = ExplicitHypergraph::unweighted(next, edges)?;
    Ok(Unweighted {
        hypergraph,
        copies,
        edge_copies,
        offsets,
    })
}
