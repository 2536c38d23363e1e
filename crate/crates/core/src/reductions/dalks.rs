use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_expansion, internal_weight, SseInstance, VertexSubset, WeightedGraph};
use crate::rational::{self, from_usize, ratio, Rational};

/// How the heavy gadget is attached to the SSE graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetMode {
    /// One extra vertex `v*` carrying a self-loop of weight `dδn/2`; `k = 1 + δn`.
    SelfLoop,
    /// Two extra vertices joined by an edge of weight `dδn/2`; `k = 2 + δn`.
    #[default]
    TwoVertex,
}

impl GadgetMode {
    pub fn extra_vertices(self) -> usize {
        match self {
            GadgetMode::SelfLoop => 1,
            GadgetMode::TwoVertex => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DalksInstance {
    pub graph: WeightedGraph,
    pub k: usize,
    pub mode: GadgetMode,
    /// Indices of the gadget vertices (appended after the original ones).
    pub gadget: Vec<usize>,
    pub degree: Rational,
    pub delta_n: usize,
}

impl DalksInstance {
    /// `S` plus every gadget vertex, as a subset of the reduced graph.
    pub fn with_gadget(&self, s: &VertexSubset) -> VertexSubset {
        let mut out = VertexSubset::empty(self.graph.n());
        for v in s.iter() {
            out.insert(v);
        }
        for &v in &self.gadget {
            out.insert(v);
        }
        out
    }

    pub fn gadget_weight(&self) -> Rational {
        &self.degree * from_usize(self.delta_n) / rational::int(2)
    }
}

pub fn reduce_sse_to_dalks(inst: &SseInstance, mode: GadgetMode) -> Result<DalksInstance> {
    let g = &inst.graph;
    let n = g.n();
    let dn = inst.delta_n();
    let w = inst.degree() * from_usize(dn) / rational::int(2);
    let mut edges: Vec<_> = g.edges().to_vec();
    let gadget = match mode {
        GadgetMode::SelfLoop => {
            edges.push((n, n, w));
            vec![n]
        }
        GadgetMode::TwoVertex => {
            edges.push((n, n + 1, w));
            vec![n, n + 1]
        }
    };
    let graph = WeightedGraph::new(n + gadget.len(), edges)?;
    Ok(DalksInstance {
        graph,
        k: dn + gadget.len(),
        mode,
        gadget,
        degree: inst.degree().clone(),
        delta_n: dn,
    })
}

#[derive(Debug, Clone)]
pub struct DalksCompleteness {
    /// Exact density of `S ∪ gadget` in the reduced graph.
    pub density: Rational,
    /// `(δn/k)(d/2 + (1 − Φ(S))d/2)`.
    pub closed_form: Rational,
    /// `dδn(1 − η/2)/k`.
    pub lower_bound: Rational,
    pub expansion: Rational,
}

impl DalksCompleteness {
    pub fn identity_holds(&self) -> bool {
        self.density == self.closed_form
    }

    pub fn bound_holds(&self) -> bool {
        self.density >= self.lower_bound
    }
}

/// Density of the planted set together with the gadget, compared with the
/// closed form and the completeness lower bound for the given `η`.
pub fn dalks_completeness_density(
    original: &WeightedGraph,
    s: &VertexSubset,
    reduced: &DalksInstance,
    eta: &Rational,
) -> Result<DalksCompleteness> {
    if s.len() != reduced.delta_n {
        return Err(Error::PreconditionViolated(format!(
            "|S| = {} but δn = {}",
            s.len(),
            reduced.delta_n
        )));
    }
    if 2 * s.len() > original.n() {
        return Err(Error::PreconditionViolated("|S| must be at most n/2".into()));
    }
    let set = reduced.with_gadget(s);
    let density = internal_weight(&reduced.graph, &set) / from_usize(set.len());
    let phi = edge_expansion(original, s)?;
    let d = &reduced.degree;
    let dn = from_usize(reduced.delta_n);
    let k = from_usize(reduced.k);
    let half = ratio(1, 2);
    let closed_form = (&dn / &k) * (d * &half + (rational::int(1) - &phi) * &half * d);
    let lower_bound = d * &dn * (rational::int(1) - eta * &half) / &k;
    Ok(DalksCompleteness {
        density,
        closed_form,
        lower_bound,
        expansion: phi,
    })
}

/// `dδn(1/2 + max{η, 1/(δn) + 1/M})/k`, the largest density any set of at
/// least `k` vertices may have on the soundness side.
pub fn dalks_soundness_bound(d: &Rational, delta_n: usize, eta: &Rational, m: &Rational, k: usize) -> Rational {
    if delta_n == 0 {
        return Rational::zero();
    }
    let dn = from_usize(delta_n);
    let slack = rational::max(eta, &(rational::int(1) / &dn + rational::int(1) / m));
    d * &dn * (ratio(1, 2) + slack) / from_usize(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{solve_dalks, Budget};
    use crate::rational::int;

    fn set(n: usize, v: &[usize]) -> VertexSubset {
        VertexSubset::from_indices(n, v.iter().copied()).unwrap()
    }

    #[test]
    fn gadget_weights_and_k() {
        // d = 3, δn = 4.
        let k4 = WeightedGraph::complete(4);
        let g = k4.disjoint_union(&k4);
        let inst = SseInstance::new(g, ratio(1, 2), int(0), int(1)).unwrap();
        let loop_red = reduce_sse_to_dalks(&inst, GadgetMode::SelfLoop).unwrap();
        assert_eq!(loop_red.graph.weight(8, 8), int(6));
        assert_eq!(loop_red.k, 5);
        let pair_red = reduce_sse_to_dalks(&inst, GadgetMode::TwoVertex).unwrap();
        assert_eq!(pair_red.graph.weight(8, 9), int(6));
        assert_eq!(pair_red.k, 6);

        let c10 = SseInstance::new(WeightedGraph::cycle(10), ratio(1, 5), ratio(1, 10), int(1)).unwrap();
        assert_eq!(reduce_sse_to_dalks(&c10, GadgetMode::SelfLoop).unwrap().k, 3);
    }

    #[test]
    fn completeness_identity() {
        // Two disjoint 4-cycles are 2-regular; an edge inside one has Φ = 1/2
        // and a whole cycle has Φ = 0.
        let c4 = WeightedGraph::cycle(4);
        let g = c4.disjoint_union(&c4);
        let inst = SseInstance::new(g.clone(), ratio(1, 4), int(0), int(1)).unwrap();
        for mode in [GadgetMode::SelfLoop, GadgetMode::TwoVertex] {
            let red = reduce_sse_to_dalks(&inst, mode).unwrap();
            let c = dalks_completeness_density(&g, &set(8, &[0, 1]), &red, &ratio(1, 2)).unwrap();
            assert!(c.identity_holds());
            assert!(c.bound_holds());
            let far = dalks_completeness_density(&g, &set(8, &[0, 2]), &red, &int(1)).unwrap();
            assert_eq!(far.expansion, int(1));
            assert_eq!(far.density, from_usize(2) / from_usize(red.k) * int(1));
        }
    }

    #[test]
    fn planted_density_example() {
        // Φ(S) = 0, d = 2, δn = 2, k = 3 gives density 4/3.
        let g = WeightedGraph::new(4, [(0, 1, int(2)), (2, 3, int(2))]).unwrap();
        let inst = SseInstance::new(g.clone(), ratio(1, 2), int(0), int(1)).unwrap();
        let red = reduce_sse_to_dalks(&inst, GadgetMode::SelfLoop).unwrap();
        let c = dalks_completeness_density(&g, &set(4, &[0, 1]), &red, &int(0)).unwrap();
        assert_eq!(c.density, ratio(4, 3));
        assert!(c.identity_holds());
        assert_eq!(c.density, red.degree.clone() * int(2) / int(3));
    }

    #[test]
    fn soundness_bound_on_complete_graph() {
        // K_8 sets of size <= 4 all expand well; the oracle optimum must stay
        // below the bound.
        let k8 = WeightedGraph::complete(8);
        let inst = SseInstance::new(k8, ratio(1, 4), int(0), int(2)).unwrap();
        let pair = crate::graph::VertexSubset::from_indices(8, [0, 1, 2, 3]).unwrap();
        let eta = int(1) - edge_expansion(&inst.graph, &pair).unwrap();
        for mode in [GadgetMode::SelfLoop, GadgetMode::TwoVertex] {
            let red = reduce_sse_to_dalks(&inst, mode).unwrap();
            let best = solve_dalks(&red.graph, red.k, Budget::default()).unwrap();
            let bound = dalks_soundness_bound(&red.degree, red.delta_n, &eta, &inst.m, red.k);
            assert!(best.density <= bound, "{mode:?}");
        }
    }
}
