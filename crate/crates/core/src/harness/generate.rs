use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSubset, WeightedGraph};
use crate::oracles::{BipartiteGraph, ExplicitHypergraph};
use crate::rational::{self, from_usize, Rational};

/// A regular graph with a planted set `S` of size `δn` and exact target
/// expansion `Φ(S)`.
///
/// Edge weights are uniform inside `S`, inside `V ∖ S` and across; the
/// seed only relabels vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSseSpec {
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    #[serde(with = "rational::serde_str")]
    pub phi: Rational,
    #[serde(with = "rational::serde_str", default = "rational_one")]
    pub degree: Rational,
    #[serde(default)]
    pub seed: u64,
}

fn rational_one() -> Rational {
    Rational::one()
}

impl PlantedSseSpec {
    pub fn new(n: usize, delta: Rational, phi: Rational, seed: u64) -> Self {
        PlantedSseSpec {
            n,
            delta,
            phi,
            degree: Rational::one(),
            seed,
        }
    }
}

/// Spreads `per_vertex` uniformly over the pairs inside `part`; a single
/// vertex gets it as a loop.
fn clique_edges(part: &[usize], per_vertex: &Rational, out: &mut Vec<(usize, usize, Rational)>) {
    if part.len() == 1 {
        out.push((part[0], part[0], per_vertex.clone()));
        return;
    }
    let w = per_vertex / from_usize(part.len() - 1);
    for (i, &u) in part.iter().enumerate() {
        for &v in &part[i + 1..] {
            out.push((u, v, w.clone()));
        }
    }
}

pub fn gen_planted(spec: &PlantedSseSpec) -> Result<(WeightedGraph, VertexSubset)> {
    let n = spec.n;
    let dn = &spec.delta * from_usize(n);
    let s = rational::to_usize(&dn).ok_or_else(|| Error::NonIntegralDeltaN(rational::format(&dn)))?;
    if s == 0 || s >= n {
        return Err(Error::InfeasibleTarget(format!("|S| = {s} must lie in 1..{n}")));
    }
    if spec.phi.is_negative() || spec.phi > Rational::one() {
        return Err(Error::InfeasibleTarget(format!(
            "Φ = {} outside [0, 1]",
            rational::format(&spec.phi)
        )));
    }
    if !spec.degree.is_positive() {
        return Err(Error::InfeasibleTarget("degree must be positive".into()));
    }
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let (inside, outside) = labels.split_at(s);
    let (small, big) = if s <= n - s {
        (inside, outside)
    } else {
        (outside, inside)
    };
    let d = &spec.degree;
    // Φ = c·|big| / d, so each vertex spends Φd across and the rest inside.
    let c = &spec.phi * d / from_usize(big.len());
    let small_rest = d - &c * from_usize(big.len());
    let big_rest = d - &c * from_usize(small.len());
    let mut edges = Vec::new();
    clique_edges(small, &small_rest, &mut edges);
    clique_edges(big, &big_rest, &mut edges);
    if !c.is_zero() {
        for &u in small {
            for &v in big {
                edges.push((u, v, c.clone()));
            }
        }
    }
    let g = WeightedGraph::new(n, edges)?;
    Ok((g, VertexSubset::from_indices(n, inside.iter().copied())?))
}

/// `Σ_j (P_j + P_jᵀ)/2` for `perms` uniformly random permutations, so every
/// vertex has degree exactly `perms`. Fixed points become loops.
pub fn random_regular(n: usize, perms: usize, seed: u64) -> Result<WeightedGraph> {
    if n == 0 || perms == 0 {
        return Err(Error::invalid("need n > 0 and at least one permutation"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = rational::ratio(1, 2);
    let mut edges = Vec::with_capacity(n * perms);
    for _ in 0..perms {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        for (u, &v) in p.iter().enumerate() {
            let w = if u == v { Rational::one() } else { half.clone() };
            edges.push((u, v, w));
        }
    }
    WeightedGraph::from_accumulated(n, edges)
}

/// Unit-measure hypergraph on `m` vertices with `edges` random hyperedges
/// of size 1..=3.
pub fn random_hypergraph(m: usize, edges: usize, seed: u64) -> Result<ExplicitHypergraph> {
    if m == 0 {
        return Err(Error::invalid("hypergraph needs at least one vertex"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let list = (0..edges)
        .map(|_| {
            let size = rng.gen_range(1..=m.min(3));
            let mut e: Vec<usize> = rand::seq::index::sample(&mut rng, m, size).into_vec();
            e.sort_unstable();
            e
        })
        .collect();
    ExplicitHypergraph::unweighted(m, list)
}

/// `n × n` bipartite graph containing the complete biclique on the first
/// `planted` vertices of each side; every other pair is an edge with
/// probability `noise`.
pub fn planted_biclique(n: usize, planted: usize, noise: &Rational, seed: u64) -> Result<BipartiteGraph> {
    if planted > n {
        return Err(Error::invalid("planted side larger than n"));
    }
    if noise.is_negative() || *noise > Rational::one() {
        return Err(Error::invalid("noise probability outside [0, 1]"));
    }
    let p = rational::to_f64(noise);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = BipartiteGraph::empty(n, n);
    for l in 0..n {
        for r in 0..n {
            if (l < planted && r < planted) || rng.gen_bool(p) {
                g.add_edge(l, r);
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{edge_expansion, validate_regular, Regularity};
    use crate::rational::{int, ratio};

    fn expansion(spec: &PlantedSseSpec) -> (WeightedGraph, Rational) {
        let (g, s) = gen_planted(spec).unwrap();
        assert!(matches!(validate_regular(&g), Regularity::Regular(_)));
        let phi = edge_expansion(&g, &s).unwrap();
        (g, phi)
    }

    #[test]
    fn zero_target_is_disjoint() {
        let (g, phi) = expansion(&PlantedSseSpec::new(6, ratio(1, 3), int(0), 1));
        assert_eq!(phi, int(0));
        assert_eq!(g.edges().len(), 1 + 6);
    }

    #[test]
    fn full_target_at_half_is_bipartite() {
        let (g, phi) = expansion(&PlantedSseSpec::new(6, ratio(1, 2), int(1), 2));
        assert_eq!(phi, int(1));
        assert_eq!(g.edges().len(), 9);
    }

    #[test]
    fn mixed_targets_hit_exactly() {
        for (n, delta, phi) in [
            (8, ratio(1, 4), ratio(1, 2)),
            (7, ratio(3, 7), ratio(2, 9)),
            (5, ratio(4, 5), ratio(1, 3)),
        ] {
            let spec = PlantedSseSpec::new(n, delta, phi.clone(), 9);
            assert_eq!(expansion(&spec).1, phi);
        }
    }

    #[test]
    fn infeasible_targets() {
        let bad = |n, d, p| gen_planted(&PlantedSseSpec::new(n, d, p, 0));
        assert!(matches!(bad(6, ratio(1, 4), int(0)), Err(Error::NonIntegralDeltaN(_))));
        assert!(matches!(bad(6, int(1), int(0)), Err(Error::InfeasibleTarget(_))));
        assert!(matches!(
            bad(6, ratio(1, 3), ratio(3, 2)),
            Err(Error::InfeasibleTarget(_))
        ));
    }

    #[test]
    fn random_regular_has_requested_degree() {
        for seed in 0..5 {
            let g = random_regular(7, 3, seed).unwrap();
            assert_eq!(g.regular_degree().unwrap(), int(3));
        }
    }

    #[test]
    fn planted_biclique_contains_block() {
        let g = planted_biclique(8, 4, &int(0), 3).unwrap();
        assert_eq!(g.edge_count(), 16);
        assert!(g.is_biclique(&[0, 1, 2, 3], &[0, 1, 2, 3]));
    }
}
