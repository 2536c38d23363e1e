//! Unique games and the SSE to unique games step.
//!
//! Labels are `0..R` internally; files and reports show them 1-based.
//! A permutation `perm` acts on tuples by moving coordinate `i` to position
//! `perm[i]`, and on labels by `i ↦ perm[i]`.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{decode_tuple, edge_expansion, encode_tuple, sample_index, VertexSubset, WeightedGraph};
use crate::oracles::Budget;
use crate::rational::{self, from_usize, Rational};

pub type Perm = Vec<usize>;

/// `out[perm[i]] = a[i]`.
pub fn apply_perm<T: Clone>(perm: &[usize], a: &[T]) -> Vec<T> {
    let mut out = a.to_vec();
    for (i, x) in a.iter().enumerate() {
        out[perm[i]] = x.clone();
    }
    out
}

/// `(p ∘ q)[i] = p[q[i]]`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&i| p[i]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &j in p {
        if j >= p.len() || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

pub fn identity(r: usize) -> Perm {
    (0..r).collect()
}

/// `Π_{R,k}`: permutations of `0..R` mapping each of the `k` contiguous
/// blocks of length `R/k` onto itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPermutationGroup {
    r: usize,
    k: usize,
}

impl BlockPermutationGroup {
    pub fn new(r: usize, k: usize) -> Result<Self> {
        if k == 0 || r == 0 || !r.is_multiple_of(k) {
            return Err(Error::KNotDividingR { k, r });
        }
        Ok(BlockPermutationGroup { r, k })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block_len(&self) -> usize {
        self.r / self.k
    }

    pub fn block_of(&self, i: usize) -> usize {
        i / self.block_len()
    }

    /// `((R/k)!)^k`, saturating.
    pub fn order(&self) -> u128 {
        let f = (1..=self.block_len() as u128).fold(1u128, |a, b| a.saturating_mul(b));
        (0..self.k).fold(1u128, |a, _| a.saturating_mul(f))
    }

    pub fn contains(&self, p: &[usize]) -> bool {
        p.len() == self.r
            && is_permutation(p)
            && p.iter().enumerate().all(|(i, &j)| self.block_of(i) == self.block_of(j))
    }

    /// Every element, with blocks varied in lexicographic order.
    pub fn elements(&self, budget: Budget) -> Result<Vec<Perm>> {
        budget.check(self.order())?;
        let m = self.block_len();
        let block_perms: Vec<Vec<usize>> = (0..m).permutations(m).collect();
        let per_block = vec![block_perms; self.k];
        Ok(per_block
            .into_iter()
            .multi_cartesian_product()
            .map(|choice| {
                choice
                    .iter()
                    .enumerate()
                    .flat_map(|(b, p)| p.iter().map(move |&j| b * m + j))
                    .collect()
            })
            .collect())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        let m = self.block_len();
        let mut p = Vec::with_capacity(self.r);
        for b in 0..self.k {
            let mut block: Vec<usize> = (b * m..(b + 1) * m).collect();
            block.shuffle(rng);
            p.extend(block);
        }
        p
    }
}

/// Row-stochastic transition matrix on the base vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateKernel {
    matrix: Vec<Vec<Rational>>,
}

impl CoordinateKernel {
    pub fn new(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let n = matrix.len();
        for row in &matrix {
            if row.len() != n || row.iter().sum::<Rational>() != Rational::one() {
                return Err(Error::invalid("kernel rows must have length n and sum to 1"));
            }
        }
        Ok(CoordinateKernel { matrix })
    }

    /// The random-walk step `w(a, b) / d` of a regular graph.
    pub fn graph_step(g: &WeightedGraph) -> Result<Self> {
        Self::new(g.transition_matrix()?)
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn p(&self, a: usize, b: usize) -> &Rational {
        &self.matrix[a][b]
    }

    pub fn row(&self, a: usize) -> Vec<(usize, Rational)> {
        self.matrix[a]
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(b, p)| (b, p.clone()))
            .collect()
    }

    /// First `self`, then `next`.
    pub fn then(&self, next: &CoordinateKernel) -> CoordinateKernel {
        let n = self.n();
        let matrix = (0..n)
            .map(|a| {
                (0..n)
                    .map(|c| (0..n).map(|b| &self.matrix[a][b] * &next.matrix[b][c]).sum())
                    .collect()
            })
            .collect();
        CoordinateKernel { matrix }
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }
}

/// `T_V`: keep a coordinate with probability `1 − ε_V`, otherwise resample
/// it uniformly from the base vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseKernel {
    n: usize,
    eps_v: Rational,
}

impl NoiseKernel {
    pub fn new(n: usize, eps_v: Rational) -> Result<Self> {
        if n == 0 || eps_v < Rational::zero() || eps_v > Rational::one() {
            return Err(Error::invalid("noise needs n >= 1 and eps_V in [0, 1]"));
        }
        Ok(NoiseKernel { n, eps_v })
    }

    pub fn eps_v(&self) -> &Rational {
        &self.eps_v
    }

    pub fn p(&self, a: usize, b: usize) -> Rational {
        let resample = &self.eps_v / from_usize(self.n);
        if a == b {
            Rational::one() - &self.eps_v + resample
        } else {
            resample
        }
    }

    pub fn kernel(&self) -> CoordinateKernel {
        let matrix = (0..self.n)
            .map(|a| (0..self.n).map(|b| self.p(a, b)).collect())
            .collect();
        CoordinateKernel { matrix }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, a: usize) -> usize {
        if rng.gen_bool(rational::to_f64(&self.eps_v).clamp(0.0, 1.0)) {
            rng.gen_range(0..self.n)
        } else {
            a
        }
    }
}

/// `Γ = T_V ∘ G ∘ T_V` per coordinate.
pub fn gamma_kernel(g: &WeightedGraph, eps_v: &Rational) -> Result<CoordinateKernel> {
    let noise = NoiseKernel::new(g.n(), eps_v.clone())?.kernel();
    Ok(noise.then(&CoordinateKernel::graph_step(g)?).then(&noise))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UgEdge {
    pub u: usize,
    pub v: usize,
    pub weight: Rational,
    /// Constraint `perm[F(u)] = F(v)`.
    pub perm: Perm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniqueGame {
    vertex_count: usize,
    r: usize,
    /// When set, vertex `i` is the tuple `decode_tuple(i, base, r)`.
    tuple_base: Option<usize>,
    edges: Vec<UgEdge>,
}

/// On-disk format: vertices as tuple strings, edges as
/// `[u, v, "p/q", perm]` with a 1-based permutation array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UgJson {
    #[serde(rename = "R")]
    pub r: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize, String, Vec<usize>)>,
}

impl UniqueGame {
    pub fn new(vertex_count: usize, r: usize, edges: Vec<UgEdge>) -> Result<Self> {
        for e in &edges {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) outside 0..{vertex_count}",
                    e.u, e.v
                )));
            }
            if e.perm.len() != r || !is_permutation(&e.perm) {
                return Err(Error::invalid("edge constraint is not a permutation of [R]"));
            }
        }
        Ok(UniqueGame {
            vertex_count,
            r,
            tuple_base: None,
            edges,
        })
    }

    pub fn with_tuple_vertices(mut self, base: usize) -> Self {
        self.tuple_base = Some(base);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn tuple_base(&self) -> Option<usize> {
        self.tuple_base
    }

    pub fn edges(&self) -> &[UgEdge] {
        &self.edges
    }

    pub fn total_weight(&self) -> Rational {
        self.edges.iter().map(|e| &e.weight).sum()
    }

    fn vertex_name(&self, i: usize) -> String {
        match self.tuple_base {
            Some(base) => format!("({})", decode_tuple(i, base, self.r).iter().join(",")),
            None => i.to_string(),
        }
    }

    pub fn to_json(&self) -> UgJson {
        UgJson {
            r: self.r,
            vertices: (0..self.vertex_count).map(|i| self.vertex_name(i)).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    (
                        e.u,
                        e.v,
                        rational::format(&e.weight),
                        e.perm.iter().map(|p| p + 1).collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn from_json(json: &UgJson) -> Result<Self> {
        let edges = json
            .edges
            .iter()
            .map(|(u, v, w, perm)| {
                if perm.contains(&0) {
                    return Err(Error::invalid("permutation arrays are 1-based"));
                }
                Ok(UgEdge {
                    u: *u,
                    v: *v,
                    weight: rational::parse(w)?,
                    perm: perm.iter().map(|p| p - 1).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        UniqueGame::new(json.vertices.len(), json.r, edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UgBuildMode {
    /// Enumerate `(Ã, B̃, π_A, π_B)` with exact probabilities.
    Exact,
    /// Draw `count` edges i.i.d., each of weight `1/count`.
    Sample { seed: u64, count: usize },
}

/// The SSE to unique games construction on tuples `V^R`: `A ∼ V^R`,
/// `Ã ∼ T_V(A)`, `B ∼ G^{⊗R}(Ã)`, `B̃ ∼ T_V(B)`, `π_A, π_B ∼ Π_{R,k}`, edge
/// `(π_A(Ã), π_B(B̃))` with constraint `π_B ∘ π_A^{-1}`.
///
/// Identical edges are merged by summing their weights.
pub fn build_ug(
    g: &WeightedGraph,
    r: usize,
    k: usize,
    eps_v: &Rational,
    mode: UgBuildMode,
    budget: Budget,
) -> Result<UniqueGame> {
    let group = BlockPermutationGroup::new(r, k)?;
    g.regular_degree()?;
    let n = g.n();
    let noise = NoiseKernel::new(n, eps_v.clone())?;
    let tuples = (n as u128)
        .checked_pow(r as u32)
        .filter(|&t| t <= usize::MAX as u128)
        .ok_or(Error::Overflow)?;
    let mut acc: BTreeMap<(usize, usize, Perm), Rational> = BTreeMap::new();
    match mode {
        UgBuildMode::Exact => {
            let order = group.order();
            let states = tuples
                .saturating_mul(tuples)
                .saturating_mul(order.saturating_mul(order));
            budget.check(states)?;
            let perms = group.elements(budget)?;
            let inverses: Vec<Perm> = perms.iter().map(|p| inverse(p)).collect();
            // Ã is uniform because A is and T_V preserves the uniform measure.
            let step = CoordinateKernel::graph_step(g)?.then(&noise.kernel());
            let base = Rational::one() / (from_usize(tuples as usize) * from_usize(perms.len() * perms.len()));
            for ai in 0..tuples as usize {
                let a = decode_tuple(ai, n, r);
                for bi in 0..tuples as usize {
                    let b = decode_tuple(bi, n, r);
                    let mut p = base.clone();
                    for (x, y) in a.iter().zip(&b) {
                        p *= step.p(*x, *y);
                        if p.is_zero() {
                            break;
                        }
                    }
                    if p.is_zero() {
                        continue;
                    }
                    for (pa, pa_inv) in perms.iter().zip(&inverses) {
                        let u = encode_tuple(&apply_perm(pa, &a), n);
                        for pb in &perms {
                            let v = encode_tuple(&apply_perm(pb, &b), n);
                            *acc.entry((u, v, compose(pb, pa_inv))).or_insert_with(Rational::zero) += &p;
                        }
                    }
                }
            }
        }
        UgBuildMode::Sample { seed, count } => {
            if count == 0 {
                return Err(Error::invalid("sample count must be positive"));
            }
            budget.check(count as u128)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = Rational::new(1.into(), count.into());
            let dists: Vec<_> = (0..n).map(|v| g.neighbor_distribution(v)).collect();
            for _ in 0..count {
                let a: Vec<usize> = (0..r).map(|_| rng.gen_range(0..n)).collect();
                let at: Vec<usize> = a.iter().map(|&x| noise.sample(&mut rng, x)).collect();
                let b: Vec<usize> = at.iter().map(|&x| sample_index(&mut rng, &dists[x])).collect();
                let bt: Vec<usize> = b.iter().map(|&x| noise.sample(&mut rng, x)).collect();
                let pa = group.sample(&mut rng);
                let pb = group.sample(&mut rng);
                let u = encode_tuple(&apply_perm(&pa, &at), n);
                let v = encode_tuple(&apply_perm(&pb, &bt), n);
                *acc.entry((u, v, compose(&pb, &inverse(&pa))))
                    .or_insert_with(Rational::zero) += &w;
            }
        }
    }
    let edges = acc
        .into_iter()
        .map(|((u, v, perm), weight)| UgEdge { u, v, weight, perm })
        .collect();
    Ok(UniqueGame::new(tuples as usize, r, edges)?.with_tuple_vertices(n))
}

/// The planted label of a tuple: the coordinate of the unique `S`-member
/// in the first block containing exactly one. `None` when no block does.
pub fn intended_label(s: &VertexSubset, k: usize, a: &[usize]) -> Option<usize> {
    let m = a.len() / k;
    (0..k).find_map(|j| {
        let hits: Vec<usize> = (j * m..(j + 1) * m).filter(|&i| s.contains(a[i])).collect();
        (hits.len() == 1).then(|| hits[0])
    })
}

/// Labels for every tuple in `V^R` (lexicographic index order). Tuples with
/// no qualifying block get label 0 and are flagged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntendedAssignment {
    pub labels: Vec<usize>,
    pub flagged: Vec<bool>,
}

impl IntendedAssignment {
    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|f| **f).count()
    }
}

pub fn intended_assignment(
    n: usize,
    s: &VertexSubset,
    r: usize,
    k: usize,
    budget: Budget,
) -> Result<IntendedAssignment> {
    BlockPermutationGroup::new(r, k)?;
    let tuples = (n as u128).saturating_pow(r as u32);
    budget.check(tuples)?;
    let mut labels = Vec::with_capacity(tuples as usize);
    let mut flagged = Vec::with_capacity(tuples as usize);
    for i in 0..tuples as usize {
        let a = decode_tuple(i, n, r);
        match intended_label(s, k, &a) {
            Some(l) => {
                labels.push(l);
                flagged.push(false);
            }
            None => {
                labels.push(0);
                flagged.push(true);
            }
        }
    }
    Ok(IntendedAssignment { labels, flagged })
}

/// Single-coordinate crossing probabilities of the chain
/// `A_i → Ã_i → B_i → B̃_i` (noise, graph step, noise) and their bounds
/// with `η = Φ(S)` and `δ = |S|/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateChain {
    /// `Pr[B̃_i ∈ S | A_i ∉ S]`.
    pub enter: Rational,
    /// `Pr[B̃_i ∉ S | A_i ∈ S]`.
    pub leave: Rational,
    pub delta: Rational,
    pub eta: Rational,
    /// `2ε_Vδ + 2ηδ`.
    pub enter_bound: Rational,
    /// `2ε_V + η`.
    pub leave_bound: Rational,
}

impl CoordinateChain {
    pub fn holds(&self) -> bool {
        self.enter <= self.enter_bound && self.leave <= self.leave_bound
    }
}

pub fn coordinate_chain(g: &WeightedGraph, s: &VertexSubset, eps_v: &Rational) -> Result<CoordinateChain> {
    let eta = edge_expansion(g, s)?;
    let n = g.n();
    let gamma = gamma_kernel(g, eps_v)?;
    let inside = s.len();
    let mut enter = Rational::zero();
    let mut leave = Rational::zero();
    for a in 0..n {
        for b in 0..n {
            let p = gamma.p(a, b);
            match (s.contains(a), s.contains(b)) {
                (false, true) => enter += p,
                (true, false) => leave += p,
                _ => {}
            }
        }
    }
    let enter = enter / from_usize(n - inside);
    let leave = leave / from_usize(inside);
    let delta = Rational::new(inside.into(), n.into());
    let two = Rational::from_integer(2.into());
    Ok(CoordinateChain {
        enter_bound: &two * eps_v * &delta + &two * &eta * &delta,
        leave_bound: &two * eps_v + &eta,
        enter,
        leave,
        delta,
        eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn set(n: usize, v: &[usize]) -> VertexSubset {
        VertexSubset::from_indices(n, v.iter().copied()).unwrap()
    }

    #[test]
    fn permutation_conventions() {
        let p = vec![1, 2, 0];
        assert_eq!(apply_perm(&p, &['a', 'b', 'c']), vec!['c', 'a', 'b']);
        assert_eq!(compose(&p, &inverse(&p)), identity(3));
        let q = vec![0, 2, 1];
        let a = ['a', 'b', 'c'];
        assert_eq!(apply_perm(&compose(&p, &q), &a), apply_perm(&p, &apply_perm(&q, &a)));
    }

    #[test]
    fn block_group_order_and_membership() {
        let g = BlockPermutationGroup::new(4, 2).unwrap();
        let all = g.elements(Budget::default()).unwrap();
        assert_eq!(all.len() as u128, g.order());
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|p| g.contains(p)));
        assert!(!g.contains(&[2, 1, 0, 3]));
        assert_eq!(
            BlockPermutationGroup::new(2, 2)
                .unwrap()
                .elements(Budget::default())
                .unwrap(),
            vec![vec![0, 1]]
        );
        assert!(matches!(
            BlockPermutationGroup::new(3, 2),
            Err(Error::KNotDividingR { .. })
        ));
    }

    #[test]
    fn noise_rows_are_stochastic() {
        let t = NoiseKernel::new(3, ratio(1, 4)).unwrap();
        assert!(CoordinateKernel::new(t.kernel().matrix().to_vec()).is_ok());
        assert_eq!(t.p(0, 0), ratio(3, 4) + ratio(1, 12));
    }

    #[test]
    fn exact_ug_is_normalized() {
        let k2 = WeightedGraph::complete(2);
        let u = build_ug(&k2, 2, 1, &ratio(1, 3), UgBuildMode::Exact, Budget::default()).unwrap();
        assert_eq!(u.total_weight(), int(1));
        let u2 = build_ug(&k2, 2, 2, &ratio(1, 3), UgBuildMode::Exact, Budget::default()).unwrap();
        assert!(u2.edges().iter().all(|e| e.perm == identity(2)));
    }

    #[test]
    fn single_loop_vertex_without_noise() {
        let g = WeightedGraph::new(1, [(0, 0, int(1))]).unwrap();
        let u = build_ug(&g, 2, 1, &int(0), UgBuildMode::Exact, Budget::default()).unwrap();
        assert_eq!(u.vertex_count(), 1);
        assert!(u.edges().iter().all(|e| e.u == 0 && e.v == 0));
        assert_eq!(u.total_weight(), int(1));
    }

    #[test]
    fn sampled_ug_weights_sum_to_one() {
        let c4 = WeightedGraph::cycle(4);
        let mode = UgBuildMode::Sample { seed: 7, count: 50 };
        let u = build_ug(&c4, 2, 1, &ratio(1, 5), mode, Budget::default()).unwrap();
        assert_eq!(u.total_weight(), int(1));
        assert_eq!(u, build_ug(&c4, 2, 1, &ratio(1, 5), mode, Budget::default()).unwrap());
    }

    #[test]
    fn intended_label_examples() {
        let s = set(2, &[0]);
        assert_eq!(intended_label(&s, 2, &[0, 1]), Some(0));
        assert_eq!(intended_label(&s, 2, &[1, 1]), None);
        assert_eq!(intended_label(&s, 2, &[1, 0, 0, 1]), Some(1));
        let fa = intended_assignment(2, &s, 2, 2, Budget::default()).unwrap();
        assert_eq!(fa.flagged_count(), 1);
    }

    #[test]
    fn coordinate_chain_examples() {
        let c4 = WeightedGraph::cycle(4);
        let two = c4.disjoint_union(&c4);
        let comp = set(8, &[0, 1, 2, 3]);
        let ch = coordinate_chain(&two, &comp, &int(0)).unwrap();
        assert_eq!((ch.enter.clone(), ch.leave.clone()), (int(0), int(0)));

        let s = set(4, &[0]);
        let ch = coordinate_chain(&c4, &s, &int(1)).unwrap();
        assert_eq!(ch.enter, ch.delta);
        assert!(ch.holds());

        let ch = coordinate_chain(&c4, &s, &int(0)).unwrap();
        assert_eq!(ch.leave, int(1));
        assert_eq!(ch.leave_bound, int(1));
        assert!(ch.holds());
    }

    #[test]
    fn json_roundtrip() {
        let k2 = WeightedGraph::complete(2);
        let u = build_ug(&k2, 2, 1, &ratio(1, 3), UgBuildMode::Exact, Budget::default()).unwrap();
        let json = u.to_json();
        assert_eq!(json.vertices[1], "(0,1)");
        let back = UniqueGame::from_json(&json).unwrap();
        assert_eq!(back.edges(), u.edges());
    }
}
