use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;

use super::dalks::lex_less;
use super::{require_small, Budget, ScaledGraph};
use crate::error::Result;
use crate::graph::{SseInstance, VertexSubset};
use crate::rational::{from_usize, Rational};

/// Which side of the SSE(δ, η, M) promise an instance falls on.
#[derive(Debug, Clone, PartialEq)]
pub enum SseVerdict {
    /// Some set of size `δn` has expansion at most `η`.
    Completeness { witness: VertexSubset, expansion: Rational },
    /// Every set with size in `[δn/M, δnM]` has expansion at least `1 − η`;
    /// `min_set` is the least-expanding set in that window.
    Soundness {
        min_set: VertexSubset,
        min_expansion: Rational,
    },
    /// Neither promise holds; `min_set` refutes soundness.
    Neither {
        min_set: VertexSubset,
        min_expansion: Rational,
    },
}

/// Running minimum of `cut / (d · min(|S|, n − |S|))` with lexicographic
/// tie-breaking; `d` is common so it drops out of comparisons.
#[derive(Default)]
struct MinExpansion {
    best: Option<(i128, usize, u64)>,
}

impl MinExpansion {
    fn offer(&mut self, cut: i128, denom: usize, mask: u64) {
        let better = match self.best {
            None => true,
            Some((bc, bd, bm)) => match (cut * bd as i128).cmp(&(bc * denom as i128)) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => lex_less(mask, bm),
            },
        };
        if better {
            self.best = Some((cut, denom, mask));
        }
    }
}

/// All `s`-subsets of `0..n` as bitmasks, in increasing numeric order.
fn for_each_subset_of_size(n: usize, s: usize, mut f: impl FnMut(u64)) {
    if s == 0 || s > n {
        return;
    }
    let limit = 1u64 << n;
    let mut m: u64 = (1u64 << s) - 1;
    while m < limit {
        f(m);
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Classifies an instance by exhaustive enumeration of the relevant set
/// sizes. Completeness is checked first, so an instance satisfying both
/// promises is reported as `Completeness`.
pub fn sse_decide(inst: &SseInstance, budget: Budget) -> Result<SseVerdict> {
    let g = &inst.graph;
    let n = g.n();
    require_small(n, "SSE")?;
    let dn = inst.delta_n();
    let dn_r = from_usize(dn);
    let lo = &dn_r / &inst.m;
    let hi = &dn_r * &inst.m;
    let window: Vec<usize> = (1..n).filter(|&s| from_usize(s) >= lo && from_usize(s) <= hi).collect();
    let mut sizes = window.clone();
    if (1..n).contains(&dn) && !sizes.contains(&dn) {
        sizes.push(dn);
    }
    let states = sizes.iter().fold(0u128, |acc, &s| acc.saturating_add(binomial(n, s)));
    budget.check(states)?;

    let sg = ScaledGraph::new(g)?;
    let mut at_dn = MinExpansion::default();
    let mut in_window = MinExpansion::default();
    for &s in &sizes {
        let denom = s.min(n - s);
        let in_win = window.contains(&s);
        for_each_subset_of_size(n, s, |mask| {
            let cut = sg.cut_mask(mask);
            if s == dn {
                at_dn.offer(cut, denom, mask);
            }
            if in_win {
                in_window.offer(cut, denom, mask);
            }
        });
    }

    let expansion = |(cut, denom, _): (i128, usize, u64)| -> Rational {
        let cut = Rational::new(BigInt::from(cut), sg.scale.clone());
        cut / (inst.degree() * from_usize(denom))
    };

    if let Some(best) = at_dn.best {
        let phi = expansion(best);
        if phi <= inst.eta {
            return Ok(SseVerdict::Completeness {
                witness: VertexSubset::from_mask(n, best.2),
                expansion: phi,
            });
        }
    }
    let Some(best) = in_window.best else {
        // An empty window makes the soundness promise vacuous.
        return Ok(SseVerdict::Soundness {
            min_set: VertexSubset::empty(n),
            min_expansion: Rational::one(),
        });
    };
    let phi = expansion(best);
    let set = VertexSubset::from_mask(n, best.2);
    if phi >= Rational::one() - &inst.eta {
        Ok(SseVerdict::Soundness {
            min_set: set,
            min_expansion: phi,
        })
    } else {
        Ok(SseVerdict::Neither {
            min_set: set,
            min_expansion: phi,
        })
    }
}

#[cfg(test)]
fn subsets_of_size(n: usize, s: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_subset_of_size(n, s, |m| out.push(m));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{edge_expansion, WeightedGraph};
    use crate::rational::{int, ratio};

    #[test]
    fn gosper_enumerates_all_subsets() {
        for n in 1..=8 {
            for s in 1..=n {
                let all = subsets_of_size(n, s);
                assert_eq!(all.len() as u128, binomial(n, s));
                assert!(all.iter().all(|m| m.count_ones() as usize == s));
            }
        }
    }

    #[test]
    fn two_cliques_are_complete() {
        let k5 = WeightedGraph::complete(5);
        let inst = SseInstance::new(k5.disjoint_union(&k5), ratio(1, 2), int(0), int(1)).unwrap();
        match sse_decide(&inst, Budget::default()).unwrap() {
            SseVerdict::Completeness { witness, expansion } => {
                assert_eq!(expansion, int(0));
                assert_eq!(witness.to_vec(), vec![0, 1, 2, 3, 4]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complete_graph_pairs() {
        let k8 = WeightedGraph::complete(8);
        let inst = SseInstance::new(k8.clone(), ratio(1, 4), ratio(1, 10), int(1)).unwrap();
        let pair = VertexSubset::from_indices(8, [0, 1]).unwrap();
        let phi = edge_expansion(&k8, &pair).unwrap();
        assert_eq!(phi, ratio(6, 7));
        let verdict = sse_decide(&inst, Budget::default()).unwrap();
        if phi >= ratio(9, 10) {
            assert!(matches!(verdict, SseVerdict::Soundness { .. }));
        } else {
            assert!(matches!(verdict, SseVerdict::Neither { .. }));
        }
    }

    #[test]
    fn cycle_is_neither() {
        let c8 = WeightedGraph::cycle(8);
        let inst = SseInstance::new(c8, ratio(1, 4), ratio(1, 10), int(1)).unwrap();
        match sse_decide(&inst, Budget::default()).unwrap() {
            SseVerdict::Neither { min_set, min_expansion } => {
                assert_eq!(min_expansion, ratio(1, 2));
                assert_eq!(min_set.to_vec(), vec![0, 1]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
