//! Weighted undirected graphs with exact weights, cut quantities and
//! tensor powers.
//!
//! Self-loops are allowed; a loop of weight `w` adds `w` (once) to the
//! degree of its vertex and counts fully towards the internal weight of any
//! set containing that vertex.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::Budget;
use crate::rational::{self, from_usize, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    /// Canonical edge list: `u <= v`, sorted, positive weights only.
    edges: Vec<(usize, usize, Rational)>,
    adj: Vec<Vec<(usize, Rational)>>,
}

impl WeightedGraph {
    /// Builds a graph, rejecting out-of-range endpoints, negative weights and
    /// repeated unordered pairs. Zero-weight edges are dropped.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, Rational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if w.is_negative() {
                return Err(Error::invalid(format!("negative weight on ({u}, {v})")));
            }
            let key = (u.min(v), u.max(v));
            if map.insert(key, w).is_some() {
                return Err(Error::invalid(format!("duplicate edge {key:?}")));
            }
        }
        Ok(Self::from_map(n, map))
    }

    /// Like [`WeightedGraph::new`] but sums the weights of repeated pairs.
    pub fn from_accumulated(n: usize, edges: impl IntoIterator<Item = (usize, usize, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if w.is_negative() {
                return Err(Error::invalid(format!("negative weight on ({u}, {v})")));
            }
            *map.entry((u.min(v), u.max(v))).or_insert_with(Rational::zero) += w;
        }
        Ok(Self::from_map(n, map))
    }

    fn from_map(n: usize, map: BTreeMap<(usize, usize), Rational>) -> Self {
        let edges: Vec<_> = map
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|((u, v), w)| (u, v, w))
            .collect();
        let mut adj = vec![Vec::new(); n];
        for (u, v, w) in &edges {
            adj[*u].push((*v, w.clone()));
            if u != v {
                adj[*v].push((*u, w.clone()));
            }
        }
        for row in &mut adj {
            row.sort_by_key(|(v, _)| *v);
        }
        WeightedGraph { n, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    /// Neighbors of `u` with edge weights, sorted by neighbor; a self-loop
    /// appears once as `(u, w)`.
    pub fn neighbors(&self, u: usize) -> &[(usize, Rational)] {
        &self.adj[u]
    }

    pub fn weight(&self, u: usize, v: usize) -> Rational {
        self.adj[u]
            .binary_search_by_key(&v, |(x, _)| *x)
            .map(|i| self.adj[u][i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn degree(&self, u: usize) -> Rational {
        self.adj[u].iter().map(|(_, w)| w).sum()
    }

    pub fn has_self_loops(&self) -> bool {
        self.edges.iter().any(|(u, v, _)| u == v)
    }

    pub fn total_weight(&self) -> Rational {
        self.edges.iter().map(|(_, _, w)| w).sum()
    }

    /// The common degree, or an [`Error::IrregularGraph`] naming the first
    /// offending vertex.
    pub fn regular_degree(&self) -> Result<Rational> {
        match validate_regular(self) {
            Regularity::Regular(d) => Ok(d),
            Regularity::Violation {
                vertex,
                degree,
                expected,
            } => Err(Error::IrregularGraph {
                vertex,
                found: rational::format(&degree),
                expected: rational::format(&expected),
            }),
        }
    }

    /// Random-walk distribution `G(u)`: neighbor `v` with probability
    /// `w(u, v) / deg(u)`. Empty for isolated vertices.
    pub fn neighbor_distribution(&self, u: usize) -> Vec<(usize, Rational)> {
        let deg = self.degree(u);
        if deg.is_zero() {
            return Vec::new();
        }
        self.adj[u].iter().map(|(v, w)| (*v, w / &deg)).collect()
    }

    /// Dense row-stochastic random-walk matrix; requires positive degrees.
    pub fn transition_matrix(&self) -> Result<Vec<Vec<Rational>>> {
        let mut m = vec![vec![Rational::zero(); self.n]; self.n];
        for (u, row) in m.iter_mut().enumerate() {
            let dist = self.neighbor_distribution(u);
            if dist.is_empty() {
                return Err(Error::ZeroDegree);
            }
            for (v, p) in dist {
                row[v] = p;
            }
        }
        Ok(m)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &WeightedGraph) -> WeightedGraph {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .cloned()
            .chain(other.edges.iter().map(|(u, v, w)| (u + shift, v + shift, w.clone())));
        WeightedGraph::new(self.n + other.n, edges).expect("disjoint union is well formed")
    }

    /// Cycle `C_n` with unit weights.
    pub fn cycle(n: usize) -> WeightedGraph {
        WeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, Rational::one()))).expect("cycle is well formed")
    }

    /// Complete graph `K_n` with unit weights.
    pub fn complete(n: usize) -> WeightedGraph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, Rational::one())));
        WeightedGraph::new(n, edges).expect("complete graph is well formed")
    }

    pub fn path(n: usize) -> WeightedGraph {
        WeightedGraph::new(n, (1..n).map(|i| (i - 1, i, Rational::one()))).expect("path is well formed")
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|(u, v, w)| (*u, *v, rational::format(w)))
                .collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let edges = json
            .edges
            .iter()
            .map(|(u, v, w)| Ok((*u, *v, rational::parse(w)?)))
            .collect::<Result<Vec<_>>>()?;
        WeightedGraph::new(json.n, edges)
    }
}

/// On-disk graph format: `{"n": int, "edges": [[u, v, "p/q"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<(usize, usize, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Regularity {
    Regular(Rational),
    Violation {
        vertex: usize,
        degree: Rational,
        expected: Rational,
    },
}

/// Reports the common degree, or the first vertex whose degree differs from
/// vertex 0's. The empty graph is 0-regular.
pub fn validate_regular(g: &WeightedGraph) -> Regularity {
    if g.n == 0 {
        return Regularity::Regular(Rational::zero());
    }
    let expected = g.degree(0);
    for u in 1..g.n {
        let degree = g.degree(u);
        if degree != expected {
            return Regularity::Violation {
                vertex: u,
                degree,
                expected,
            };
        }
    }
    Regularity::Regular(expected)
}

/// A subset of `0..n` stored as a bitmask.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSubset {
    n: usize,
    words: Vec<u64>,
}

impl VertexSubset {
    pub fn empty(n: usize) -> Self {
        VertexSubset {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_indices(n: usize, items: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for v in items {
            if v >= n {
                return Err(Error::invalid(format!("vertex {v} outside 0..{n}")));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Bit `i` of `mask` selects vertex `i`; bits at or above `n` are ignored.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n.min(64) {
            if mask >> v & 1 == 1 {
                s.insert(v);
            }
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} outside 0..{}", self.n);
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        if v < self.n {
            self.words[v / 64] &= !(1 << (v % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |v| self.contains(*v))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        let mut s = Self::empty(self.n);
        for v in 0..self.n {
            if !self.contains(v) {
                s.insert(v);
            }
        }
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        let n = self.n.max(other.n);
        let mut s = Self::empty(n);
        for v in self.iter().chain(other.iter()) {
            s.insert(v);
        }
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// Lexicographic comparison of the sorted member lists.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Total weight of edges with exactly one endpoint in `s`.
pub fn cut_weight(g: &WeightedGraph, s: &VertexSubset) -> Rational {
    g.edges
        .iter()
        .filter(|(u, v, _)| s.contains(*u) != s.contains(*v))
        .map(|(_, _, w)| w)
        .sum()
}

/// Total weight of edges with both endpoints in `s`, self-loops included.
pub fn internal_weight(g: &WeightedGraph, s: &VertexSubset) -> Rational {
    g.edges
        .iter()
        .filter(|(u, v, _)| s.contains(*u) && s.contains(*v))
        .map(|(_, _, w)| w)
        .sum()
}

/// `Φ(S) = E(S, V∖S) / (d · min(|S|, |V∖S|))` on a regular graph.
pub fn edge_expansion(g: &WeightedGraph, s: &VertexSubset) -> Result<Rational> {
    let size = s.len();
    if size == 0 || size >= g.n {
        return Err(Error::EmptyOrFullSet);
    }
    let d = g.regular_degree()?;
    if d.is_zero() {
        return Err(Error::ZeroDegree);
    }
    let smaller = size.min(g.n - size);
    Ok(cut_weight(g, s) / (d * from_usize(smaller)))
}

/// Implicit `G^{⊗R}`: vertices are `R`-tuples over the base graph and
/// `weight(A, B) = Π_i w(A_i, B_i)`.
#[derive(Debug, Clone)]
pub struct TensorPower<'g> {
    base: &'g WeightedGraph,
    r: usize,
    budget: Budget,
}

impl<'g> TensorPower<'g> {
    pub fn new(base: &'g WeightedGraph, r: usize, budget: Budget) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("tensor power needs R >= 1"));
        }
        Ok(TensorPower { base, r, budget })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn vertex_count(&self) -> u128 {
        (self.base.n() as u128).saturating_pow(self.r as u32)
    }

    pub fn weight(&self, a: &[usize], b: &[usize]) -> Rational {
        assert_eq!(a.len(), self.r);
        assert_eq!(b.len(), self.r);
        let mut w = Rational::one();
        for (x, y) in a.iter().zip(b) {
            let wi = self.base.weight(*x, *y);
            if wi.is_zero() {
                return wi;
            }
            w *= wi;
        }
        w
    }

    /// Exact neighbor distribution `G^{⊗R}(A)` as the product of the
    /// per-coordinate distributions; tuples appear in lexicographic order.
    pub fn neighbor_distribution(&self, a: &[usize]) -> Result<Vec<(Vec<usize>, Rational)>> {
        let per: Vec<_> = a.iter().map(|&v| self.base.neighbor_distribution(v)).collect();
        let count = per.iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128));
        self.budget.check(count)?;
        let mut out = vec![(Vec::with_capacity(self.r), Rational::one())];
        for dist in per {
            let mut next = Vec::with_capacity(out.len() * dist.len());
            for (prefix, p) in &out {
                for (v, q) in &dist {
                    let mut t = prefix.clone();
                    t.push(*v);
                    next.push((t, p * q));
                }
            }
            out = next;
        }
        Ok(out)
    }

    pub fn sample_neighbor<R: Rng + ?Sized>(&self, rng: &mut R, a: &[usize]) -> Vec<usize> {
        a.iter()
            .map(|&v| sample_index(rng, &self.base.neighbor_distribution(v)))
            .collect()
    }

    /// Materializes the tensor graph with tuples indexed lexicographically.
    pub fn materialize(&self) -> Result<WeightedGraph> {
        let count = self.vertex_count();
        self.budget.check(count.saturating_mul(count))?;
        let n = count as usize;
        let tuples: Vec<Vec<usize>> = (0..n).map(|i| decode_tuple(i, self.base.n(), self.r)).collect();
        let mut edges = Vec::new();
        for (i, a) in tuples.iter().enumerate() {
            for (j, b) in tuples.iter().enumerate().skip(i) {
                let w = self.weight(a, b);
                if !w.is_zero() {
                    edges.push((i, j, w));
                }
            }
        }
        WeightedGraph::new(n, edges)
    }
}

/// Lexicographic rank of a tuple over `0..base` (coordinate 0 most significant).
pub fn encode_tuple(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * base + x)
}

pub fn decode_tuple(mut idx: usize, base: usize, len: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for slot in t.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    t
}

/// Draws from an exact discrete distribution using its `f64` image.
pub(crate) fn sample_index<T: Copy, R: Rng + ?Sized>(rng: &mut R, dist: &[(T, Rational)]) -> T {
    assert!(!dist.is_empty(), "sampling from an empty distribution");
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (item, p) in dist {
        acc += rational::to_f64(p);
        if u < acc {
            return *item;
        }
    }
    dist.iter()
        .rev()
        .find(|(_, p)| !p.is_zero())
        .map(|(t, _)| *t)
        .unwrap_or(dist[dist.len() - 1].0)
}

/// An SSE(δ, η, M) instance: a regular graph with its promise parameters.
#[derive(Debug, Clone)]
pub struct SseInstance {
    pub graph: WeightedGraph,
    pub delta: Rational,
    pub eta: Rational,
    pub m: Rational,
    degree: Rational,
    delta_n: usize,
}

impl SseInstance {
    pub fn new(graph: WeightedGraph, delta: Rational, eta: Rational, m: Rational) -> Result<Self> {
        let degree = graph.regular_degree()?;
        if !(delta.is_positive() && delta < Rational::one()) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if eta.is_negative() || eta >= Rational::one() {
            return Err(Error::invalid("eta must lie in [0, 1)"));
        }
        if m < Rational::one() {
            return Err(Error::invalid("M must be at least 1"));
        }
        let dn = &delta * from_usize(graph.n());
        let delta_n = rational::to_usize(&dn).ok_or_else(|| Error::NonIntegralDeltaN(rational::format(&dn)))?;
        Ok(SseInstance {
            graph,
            delta,
            eta,
            m,
            degree,
            delta_n,
        })
    }

    pub fn degree(&self) -> &Rational {
        &self.degree
    }

    /// `δn`, integral by construction.
    pub fn delta_n(&self) -> usize {
        self.delta_n
    }
}
