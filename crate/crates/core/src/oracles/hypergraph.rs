use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dalks::lex_less;
use super::{require_small, Budget};
use crate::error::{Error, Result};
use crate::graph::VertexSubset;
use crate::rational::{self, Rational, Scaled};

/// Hypergraph with rational vertex measures and hyperedge weights.
///
/// Measures and weights are kept as given; `E_H(T)` is reported both as a
/// raw weight and as a fraction of the total hyperedge weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitHypergraph {
    measures: Vec<Rational>,
    /// Sorted, deduplicated member lists.
    hyperedges: Vec<(Vec<usize>, Rational)>,
}

/// On-disk format: `{"vertices": m, "measures": ["p/q", ...], "hyperedges": [[[v, ...], "p/q"], ...]}`.
/// An empty `measures` list means uniform measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub vertices: usize,
    #[serde(default, with = "rational::serde_vec")]
    pub measures: Vec<Rational>,
    pub hyperedges: Vec<(Vec<usize>, String)>,
}

impl ExplicitHypergraph {
    pub fn new(measures: Vec<Rational>, hyperedges: Vec<(Vec<usize>, Rational)>) -> Result<Self> {
        let m = measures.len();
        if measures.iter().any(|x| x.is_negative()) {
            return Err(Error::invalid("negative vertex measure"));
        }
        let mut edges = Vec::with_capacity(hyperedges.len());
        for (mut members, w) in hyperedges {
            if members.is_empty() {
                return Err(Error::invalid("empty hyperedge"));
            }
            if let Some(v) = members.iter().find(|&&v| v >= m) {
                return Err(Error::invalid(format!("hyperedge vertex {v} outside 0..{m}")));
            }
            if w.is_negative() {
                return Err(Error::invalid("negative hyperedge weight"));
            }
            members.sort_unstable();
            members.dedup();
            edges.push((members, w));
        }
        Ok(ExplicitHypergraph {
            measures,
            hyperedges: edges,
        })
    }

    /// Uniform vertex measure `1/m` and unit hyperedge weights.
    pub fn unweighted(m: usize, hyperedges: Vec<Vec<usize>>) -> Result<Self> {
        let mu = Rational::new(1.into(), (m.max(1)).into());
        Self::new(
            vec![mu; m],
            hyperedges
                .into_iter()
                .map(|e| (e, Rational::from_integer(1.into())))
                .collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[Rational] {
        &self.measures
    }

    pub fn hyperedges(&self) -> &[(Vec<usize>, Rational)] {
        &self.hyperedges
    }

    pub fn total_measure(&self) -> Rational {
        self.measures.iter().sum()
    }

    pub fn total_weight(&self) -> Rational {
        self.hyperedges.iter().map(|(_, w)| w).sum()
    }

    pub fn measure(&self, t: &VertexSubset) -> Rational {
        t.iter().map(|v| &self.measures[v]).sum()
    }

    /// Raw weight of hyperedges lying entirely inside `t`.
    pub fn uncut_weight(&self, t: &VertexSubset) -> Rational {
        self.hyperedges
            .iter()
            .filter(|(e, _)| e.iter().all(|&v| t.contains(v)))
            .map(|(_, w)| w)
            .sum()
    }

    /// Raw weight of hyperedges meeting both `t` and its complement.
    pub fn cut_weight(&self, t: &VertexSubset) -> Rational {
        self.hyperedges
            .iter()
            .filter(|(e, _)| e.iter().any(|&v| t.contains(v)) && e.iter().any(|&v| !t.contains(v)))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn to_json(&self) -> HypergraphJson {
        HypergraphJson {
            vertices: self.vertex_count(),
            measures: self.measures.clone(),
            hyperedges: self
                .hyperedges
                .iter()
                .map(|(e, w)| (e.clone(), rational::format(w)))
                .collect(),
        }
    }

    pub fn from_json(json: &HypergraphJson) -> Result<Self> {
        let measures = if json.measures.is_empty() {
            vec![Rational::new(1.into(), json.vertices.max(1).into()); json.vertices]
        } else if json.measures.len() == json.vertices {
            json.measures.clone()
        } else {
            return Err(Error::invalid("measures length differs from vertex count"));
        };
        let edges = json
            .hyperedges
            .iter()
            .map(|(e, w)| Ok((e.clone(), rational::parse(w)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(measures, edges)
    }
}

/// A split of the vertex universe into two sides of equal measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisection {
    pub t0: VertexSubset,
    pub t1: VertexSubset,
}

impl Bisection {
    pub fn from_side(t0: VertexSubset) -> Self {
        let t1 = t0.complement();
        Bisection { t0, t1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuchbSolution {
    pub bisection: Bisection,
    /// Raw uncut weight inside `T₀` and inside `T₁`.
    pub uncut: (Rational, Rational),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallSideSolution {
    pub set: VertexSubset,
    pub uncut: Rational,
}

/// Integer-scaled masks of a hypergraph for the enumeration loops.
struct ScaledHypergraph {
    masks: Vec<u64>,
    weights: Vec<i128>,
    weight_scale: Scaled,
    measures: Vec<i128>,
    measure_total: i128,
}

impl ScaledHypergraph {
    fn new(h: &ExplicitHypergraph) -> Result<Self> {
        let weight_scale = Scaled::new(h.hyperedges.iter().map(|(_, w)| w))?;
        let measure_scale = Scaled::new(h.measures.iter())?;
        let masks = h
            .hyperedges
            .iter()
            .map(|(e, _)| e.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        let measure_total = measure_scale.numerators.iter().sum();
        Ok(ScaledHypergraph {
            masks,
            weights: weight_scale.numerators.clone(),
            weight_scale,
            measures: measure_scale.numerators,
            measure_total,
        })
    }

    fn uncut(&self, side: u64) -> i128 {
        self.masks
            .iter()
            .zip(&self.weights)
            .filter(|(m, _)| *m & !side == 0)
            .map(|(_, w)| *w)
            .sum()
    }

    fn measure(&self, side: u64) -> i128 {
        (0..self.measures.len())
            .filter(|v| side >> v & 1 == 1)
            .map(|v| self.measures[v])
            .sum()
    }

    fn unscale(&self, x: i128) -> Rational {
        if x == 0 {
            Rational::zero()
        } else {
            self.weight_scale.unscale(x)
        }
    }
}

fn enumeration_setup(h: &ExplicitHypergraph, budget: Budget) -> Result<(usize, ScaledHypergraph)> {
    let m = h.vertex_count();
    require_small(m, "hypergraph")?;
    budget.check(1u128 << m)?;
    Ok((m, ScaledHypergraph::new(h)?))
}

/// Bisection maximizing `min(E_H(T₀), E_H(T₁))`.
///
/// Sides must have equal total measure; with uniform measures that is
/// equal cardinality.
pub fn solve_muchb(h: &ExplicitHypergraph, budget: Budget) -> Result<MuchbSolution> {
    let (m, s) = enumeration_setup(h, budget)?;
    let uniform = h.measures.windows(2).all(|w| w[0] == w[1]);
    if uniform && m % 2 == 1 {
        return Err(Error::OddUniverse(format!("{m} vertices of equal measure")));
    }
    let full = (1u64 << m) - 1;
    let mut best: Option<(i128, u64)> = None;
    for side in 0..=full {
        if 2 * s.measure(side) != s.measure_total {
            continue;
        }
        let value = s.uncut(side).min(s.uncut(full & !side));
        let better = match best {
            None => true,
            Some((bv, bm)) => value > bv || (value == bv && lex_less(side, bm)),
        };
        if better {
            best = Some((value, side));
        }
    }
    let (_, side) = best.ok_or_else(|| Error::OddUniverse("no equal-measure split exists".into()))?;
    Ok(MuchbSolution {
        bisection: Bisection::from_side(VertexSubset::from_mask(m, side)),
        uncut: (s.unscale(s.uncut(side)), s.unscale(s.uncut(full & !side))),
    })
}

/// Largest `E_H(T)` over all `T` of measure at most half the total.
pub fn max_small_side_uncut(h: &ExplicitHypergraph, budget: Budget) -> Result<SmallSideSolution> {
    let (m, s) = enumeration_setup(h, budget)?;
    let full = (1u64 << m) - 1;
    let mut best: Option<(i128, u64)> = None;
    for side in 0..=full {
        if 2 * s.measure(side) > s.measure_total {
            continue;
        }
        let value = s.uncut(side);
        let better = match best {
            None => true,
            Some((bv, bm)) => value > bv || (value == bv && lex_less(side, bm)),
        };
        if better {
            best = Some((value, side));
        }
    }
    let (value, side) = best.expect("the empty set always qualifies");
    Ok(SmallSideSolution {
        set: VertexSubset::from_mask(m, side),
        uncut: s.unscale(value),
    })
}

/// `E_H(T)` as a fraction of the total hyperedge weight (0 for an empty
/// hypergraph).
pub fn uncut_fraction(h: &ExplicitHypergraph, t: &VertexSubset) -> Rational {
    let total = h.total_weight();
    if total.is_zero() {
        return total;
    }
    h.uncut_weight(t) / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn muchb_examples() {
        let h = ExplicitHypergraph::unweighted(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let sol = solve_muchb(&h, Budget::default()).unwrap();
        assert_eq!(sol.uncut, (int(1), int(1)));
        assert_eq!(sol.bisection.t0.to_vec(), vec![0, 1]);

        let whole = ExplicitHypergraph::unweighted(4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(solve_muchb(&whole, Budget::default()).unwrap().uncut, (int(0), int(0)));
        assert_eq!(max_small_side_uncut(&whole, Budget::default()).unwrap().uncut, int(0));

        let tri = ExplicitHypergraph::unweighted(4, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let small = max_small_side_uncut(&tri, Budget::default()).unwrap();
        assert_eq!(uncut_fraction(&tri, &small.set), ratio(1, 3));
    }

    #[test]
    fn odd_universe_rejected() {
        let h = ExplicitHypergraph::unweighted(3, vec![vec![0]]).unwrap();
        assert!(matches!(solve_muchb(&h, Budget::default()), Err(Error::OddUniverse(_))));
    }

    #[test]
    fn weighted_universe_bisects_by_measure() {
        let h = ExplicitHypergraph::new(
            vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)],
            vec![(vec![1, 2], int(1)), (vec![0], int(2))],
        )
        .unwrap();
        let sol = solve_muchb(&h, Budget::default()).unwrap();
        assert_eq!(sol.bisection.t0.to_vec(), vec![0]);
        assert_eq!(sol.uncut, (int(2), int(1)));
    }

    #[test]
    fn bisection_accounts_for_all_weight() {
        let h = ExplicitHypergraph::unweighted(6, vec![vec![0, 1, 2], vec![2, 3], vec![4, 5], vec![1, 5]]).unwrap();
        let sol = solve_muchb(&h, Budget::default()).unwrap();
        let b = &sol.bisection;
        assert_eq!(
            h.uncut_weight(&b.t0) + h.uncut_weight(&b.t1) + h.cut_weight(&b.t0),
            h.total_weight()
        );
    }

    #[test]
    fn json_roundtrip() {
        let h = ExplicitHypergraph::new(vec![ratio(1, 3); 3], vec![(vec![2, 0], ratio(1, 2))]).unwrap();
        let text = serde_json::to_string(&h.to_json()).unwrap();
        let back: HypergraphJson = serde_json::from_str(&text).unwrap();
        assert_eq!(ExplicitHypergraph::from_json(&back).unwrap(), h);
    }
}
