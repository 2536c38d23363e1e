use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{cut_weight, edge_expansion, internal_weight, SseInstance, VertexSubset, WeightedGraph};
use crate::oracles::{Partition, ScaledGraph};
use crate::rational::{from_usize, ratio, Rational};

/// Min k-cut instance produced from an SSE instance: same graph, `k = δn + 1`.
#[derive(Debug, Clone)]
pub struct KcutInstance {
    pub graph: WeightedGraph,
    pub k: usize,
}

pub fn reduce_sse_to_kcut(inst: &SseInstance) -> KcutInstance {
    KcutInstance {
        graph: inst.graph.clone(),
        k: inst.delta_n() + 1,
    }
}

/// `δn + 1`, failing when `δn` is not an integer.
pub fn kcut_k(n: usize, delta: &Rational) -> Result<usize> {
    let dn = delta * from_usize(n);
    crate::rational::to_usize(&dn)
        .map(|x| x + 1)
        .ok_or_else(|| Error::NonIntegralDeltaN(crate::rational::format(&dn)))
}

#[derive(Debug, Clone)]
pub struct KcutCompleteness {
    pub partition: Partition,
    pub cost: Rational,
    /// `Φ(S)`.
    pub expansion: Rational,
    /// `(1/2 + Φ(S)) · |S| · d`.
    pub bound: Rational,
}

impl KcutCompleteness {
    pub fn within_bound(&self) -> bool {
        self.cost <= self.bound
    }
}

/// The planted partition: `V ∖ S` as block 0, then one singleton block per
/// vertex of `S` in increasing order.
pub fn kcut_completeness_partition(g: &WeightedGraph, s: &VertexSubset) -> Result<KcutCompleteness> {
    if s.is_empty() || s.is_full() {
        return Err(Error::EmptyOrFullSet);
    }
    let mut assignment = vec![0; g.n()];
    for (b, v) in s.iter().enumerate() {
        assignment[v] = b + 1;
    }
    let partition = Partition::new(assignment, s.len() + 1)?;
    let cost = partition.cut_weight(g);
    let expansion = edge_expansion(g, s)?;
    let d = g.regular_degree()?;
    let bound = (ratio(1, 2) + &expansion) * from_usize(s.len()) * d;
    Ok(KcutCompleteness {
        partition,
        cost,
        expansion,
        bound,
    })
}

/// The prefix union `A = T₁ ∪ … ∪ T_i` of blocks sorted by size (ties by
/// block index), with `i` maximal subject to `|A| ≤ δn`.
pub fn prefix_union(partition: &Partition, delta_n: usize) -> VertexSubset {
    let mut blocks = partition.blocks();
    blocks.sort_by_key(|b| b.len());
    let mut a = VertexSubset::empty(partition.n());
    let mut size = 0;
    for block in blocks {
        if size + block.len() > delta_n {
            break;
        }
        size += block.len();
        for v in block {
            a.insert(v);
        }
    }
    a
}

/// Whether `|A| ≥ δn − √n`, decided exactly.
pub fn prefix_large_enough(a_size: usize, delta_n: usize, n: usize) -> bool {
    a_size >= delta_n || {
        let gap = (delta_n - a_size) as u128;
        gap * gap <= n as u128
    }
}

#[derive(Debug, Clone)]
pub struct KcutSoundnessReport {
    pub a: VertexSubset,
    pub delta_n: usize,
    /// `|A| ≥ δn − √n`.
    pub size_ok: bool,
    pub cost: Rational,
    /// `d|A| − 2E(A)`.
    pub chain_rhs: Rational,
    /// `cost ≥ d|A| − 2E(A)`.
    pub chain_ok: bool,
    pub internal_a: Rational,
    /// `η d δn / 2`.
    pub internal_threshold: Rational,
    pub degree: Rational,
    pub eta: Rational,
}

impl KcutSoundnessReport {
    pub fn holds(&self) -> bool {
        self.size_ok && self.chain_ok
    }

    /// Whether `E(A) ≤ ηdδn/2`; false flags a non-expanding witness.
    pub fn internal_small(&self) -> bool {
        self.internal_a <= self.internal_threshold
    }

    /// Whether `cost ≥ (1 − η)dδn − d√n`, decided exactly.
    pub fn final_bound_holds(&self) -> bool {
        let n = self.a.universe();
        // cost − (1 − η)dδn ≥ −d√n  ⇔  x ≥ 0 or x² ≤ d²n.
        let x = &self.cost - (Rational::from_integer(1.into()) - &self.eta) * &self.degree * from_usize(self.delta_n);
        x >= Rational::zero() || &x * &x <= &self.degree * &self.degree * from_usize(n)
    }
}

pub fn kcut_soundness_audit(
    g: &WeightedGraph,
    partition: &Partition,
    delta: &Rational,
    eta: &Rational,
) -> Result<KcutSoundnessReport> {
    let d = g.regular_degree()?;
    let dn_r = delta * from_usize(g.n());
    let delta_n =
        crate::rational::to_usize(&dn_r).ok_or_else(|| Error::NonIntegralDeltaN(crate::rational::format(&dn_r)))?;
    let a = prefix_union(partition, delta_n);
    let cost = partition.cut_weight(g);
    let internal_a = internal_weight(g, &a);
    let chain_rhs = &d * from_usize(a.len()) - Rational::from_integer(2.into()) * &internal_a;
    debug_assert_eq!(
        cut_weight(g, &a),
        &d * from_usize(a.len()) - &internal_a * Rational::from_integer(2.into()) + loops_in(g, &a)
    );
    Ok(KcutSoundnessReport {
        size_ok: prefix_large_enough(a.len(), delta_n, g.n()),
        chain_ok: cost >= chain_rhs,
        internal_threshold: eta * &d * from_usize(delta_n) / Rational::from_integer(2.into()),
        a,
        delta_n,
        cost,
        chain_rhs,
        internal_a,
        degree: d,
        eta: eta.clone(),
    })
}

fn loops_in(g: &WeightedGraph, s: &VertexSubset) -> Rational {
    g.edges()
        .iter()
        .filter(|(u, v, _)| u == v && s.contains(*u))
        .map(|(_, _, w)| w)
        .sum()
}

/// Integer-scaled soundness audit for sweeping many partitions of one graph.
#[derive(Debug, Clone)]
pub struct KcutAuditor {
    sg: ScaledGraph,
    degree: i128,
    delta_n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KcutAudit {
    pub a_size: usize,
    pub size_ok: bool,
    pub chain_ok: bool,
}

impl KcutAuditor {
    pub fn new(g: &WeightedGraph, delta_n: usize) -> Result<Self> {
        if g.n() > 63 {
            return Err(Error::invalid("auditor supports at most 63 vertices"));
        }
        let d = g.regular_degree()?;
        let sg = ScaledGraph::new(g)?;
        let scaled = d * Rational::from_integer(sg.scale.clone());
        let degree = if scaled.is_integer() {
            scaled.to_integer().to_i128().ok_or(Error::Overflow)?
        } else {
            return Err(Error::Overflow);
        };
        Ok(KcutAuditor { sg, degree, delta_n })
    }

    /// Audits a partition given as a block assignment with `k` blocks.
    pub fn audit(&self, assignment: &[usize], k: usize) -> KcutAudit {
        let n = self.sg.n;
        let mut sizes = vec![0usize; k];
        let mut masks = vec![0u64; k];
        for (v, &b) in assignment.iter().enumerate() {
            sizes[b] += 1;
            masks[b] |= 1 << v;
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&b| sizes[b]);
        let (mut a_mask, mut a_size) = (0u64, 0usize);
        for b in order {
            if a_size + sizes[b] > self.delta_n {
                break;
            }
            a_size += sizes[b];
            a_mask |= masks[b];
        }
        let cost: i128 = self
            .sg
            .edges
            .iter()
            .filter(|(u, v, _)| assignment[*u] != assignment[*v])
            .map(|(_, _, w)| *w)
            .sum();
        let rhs = self.degree * a_size as i128 - 2 * self.sg.internal_mask(a_mask);
        KcutAudit {
            a_size,
            size_ok: prefix_large_enough(a_size, self.delta_n, n),
            chain_ok: cost >= rhs,
        }
    }

    pub fn scale(&self) -> &BigInt {
        &self.sg.scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::SetPartitions;
    use crate::rational::int;

    fn set(n: usize, v: &[usize]) -> VertexSubset {
        VertexSubset::from_indices(n, v.iter().copied()).unwrap()
    }

    #[test]
    fn k_from_delta() {
        assert_eq!(kcut_k(10, &ratio(1, 5)).unwrap(), 3);
        assert_eq!(kcut_k(4, &ratio(1, 4)).unwrap(), 2);
        assert!(matches!(kcut_k(10, &ratio(1, 3)), Err(Error::NonIntegralDeltaN(_))));
        let inst = SseInstance::new(WeightedGraph::cycle(10), ratio(1, 5), ratio(1, 10), int(1)).unwrap();
        assert_eq!(reduce_sse_to_kcut(&inst).k, 3);
    }

    #[test]
    fn completeness_examples() {
        let k4 = WeightedGraph::complete(4);
        let two = k4.disjoint_union(&k4);
        let c = kcut_completeness_partition(&two, &set(8, &[0, 1, 2, 3])).unwrap();
        assert_eq!(c.cost, int(6));
        assert_eq!(c.bound, int(6));
        assert!(c.within_bound());

        let c4 = WeightedGraph::cycle(4);
        let c = kcut_completeness_partition(&c4, &set(4, &[0])).unwrap();
        assert_eq!(c.cost, int(2));
        assert!(c.within_bound());

        assert!(matches!(
            kcut_completeness_partition(&c4, &set(4, &[])),
            Err(Error::EmptyOrFullSet)
        ));
    }

    #[test]
    fn soundness_examples() {
        let c8 = WeightedGraph::cycle(8);
        let antipodal = Partition::from_blocks(8, &[vec![0, 4], vec![1, 5], vec![2, 6], vec![3, 7]]).unwrap();
        let r = kcut_soundness_audit(&c8, &antipodal, &ratio(1, 2), &ratio(1, 10)).unwrap();
        assert_eq!(r.a.len(), 4);
        assert!(r.holds());

        let singletons = Partition::new((0..8).collect(), 8).unwrap();
        let r = kcut_soundness_audit(&c8, &singletons, &ratio(1, 2), &ratio(1, 10)).unwrap();
        assert_eq!(r.a.len(), 4);
        assert!(r.holds());

        let k4 = WeightedGraph::complete(4);
        let two = k4.disjoint_union(&k4);
        let split = Partition::from_blocks(8, &[vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        let r = kcut_soundness_audit(&two, &split, &ratio(1, 2), &ratio(1, 10)).unwrap();
        assert_eq!(r.internal_a, int(6));
        assert!(!r.internal_small());
        assert!(r.holds());
    }

    #[test]
    fn auditor_agrees_with_rational_audit() {
        let g = WeightedGraph::cycle(6).disjoint_union(&WeightedGraph::cycle(3));
        let delta = ratio(1, 3);
        let auditor = KcutAuditor::new(&g, 3).unwrap();
        for a in SetPartitions::new(9, 4) {
            let p = Partition::new(a.clone(), 4).unwrap();
            let slow = kcut_soundness_audit(&g, &p, &delta, &int(0)).unwrap();
            let fast = auditor.audit(&a, 4);
            assert_eq!(fast.a_size, slow.a.len());
            assert_eq!(fast.size_ok, slow.size_ok);
            assert_eq!(fast.chain_ok, slow.chain_ok);
            assert!(slow.holds());
        }
    }
}
