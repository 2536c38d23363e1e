use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::build::{d_distribution, omega_distribution};
use super::params::{c1_formula, GadgetParams};
use super::space::Atom;
use crate::error::{Error, Result};
use crate::graph::{edge_expansion, VertexSubset, WeightedGraph};
use crate::oracles::Budget;
use crate::rational::{self, from_usize, int, pow, Rational, Scaled};
use crate::ug::gamma_kernel;

/// Exact completeness accounting for the planted bisection.
///
/// Block indices are zero-based. A conditional probability whose
/// conditioning event has probability zero is `None`; the maxima treat it
/// as `0`, which keeps the chain valid because every later term of the
/// sum then vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessAudit {
    pub k: usize,
    pub block_len: usize,
    pub delta: Rational,
    /// `Φ(S)`, playing the role of `η`.
    pub eta: Rational,
    /// `Pr[j* = j | j* > j − 1]` per block.
    pub c1_blocks: Vec<Option<Rational>>,
    pub c1: Rational,
    /// `Pr[G_j | j* > j ∧ ¬G_{<j}]` per block.
    pub c2_blocks: Vec<Option<Rational>>,
    /// The same, restricted to `W(A, x, j) = ∅`.
    pub c2_empty_blocks: Vec<Option<Rational>>,
    /// The same, restricted to `|W(A, x, j)| ≥ 2`.
    pub c2_multi_blocks: Vec<Option<Rational>>,
    pub c2: Rational,
    /// `Pr[e ⊄ T′₀ | j* = j ∧ ¬G_{<j}]` per block.
    pub c3_blocks: Vec<Option<Rational>>,
    pub c3: Rational,
    /// `E_H(T′₀)`.
    pub measured: Rational,
    /// `1 − c₃ − (1 − c₁)^k − c₂/c₁`.
    pub bound: Rational,
    /// `(R/k) · [ℓ(2ε_Vδ + 2ηδ) + ε_T(δ + 2ε_Vδℓ + 2ηδℓ)]`.
    pub empty_case_bound: Rational,
    /// `2ε_T + 2ℓ(2ε_V + η)`.
    pub multi_case_bound: Rational,
    /// `1/2 + ε_T + ℓ(2ε_V + η) + (R/k − 1) · [ℓ(2ε_Vδ + 2ηδ) + ε_T(δ + 2ε_Vδℓ + 2ηδℓ)]`.
    pub c3_bound: Rational,
}

impl CompletenessAudit {
    pub fn chain_holds(&self) -> bool {
        self.measured >= self.bound
    }

    /// Every measured per-block `c₁` equals the closed form.
    pub fn c1_matches(&self) -> bool {
        self.c1_blocks.iter().all(|c| c.as_ref() == Some(&self.c1))
    }

    pub fn c2_cases_hold(&self) -> bool {
        let le = |v: &Option<Rational>, b: &Rational| v.as_ref().is_none_or(|v| v <= b);
        self.c2_empty_blocks.iter().all(|v| le(v, &self.empty_case_bound))
            && self.c2_multi_blocks.iter().all(|v| le(v, &self.multi_case_bound))
    }

    pub fn c3_holds(&self) -> bool {
        self.c3 <= self.c3_bound
    }

    pub fn all_hold(&self) -> bool {
        self.chain_holds() && self.c1_matches() && self.c2_cases_hold() && self.c3_holds()
    }
}

/// One coordinate with everything reduced to what the events see:
/// `A_i ∈ S`, `x_i`, `i ∈ D` and the bitmask of `p` with `B̃ᵖ_i ∈ S`.
#[derive(Debug, Clone, Copy)]
struct Reduced {
    a_in: bool,
    x: Atom,
    in_d: bool,
    mask: u32,
}

/// What a hyperedge member looks like at one coordinate as far as `W`
/// is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hit {
    Miss,
    Zero,
    One,
}

/// Block index and atom of the first singleton block, if any.
fn first_singleton(hits: &[Hit], k: usize) -> Option<(usize, Hit)> {
    let m = hits.len() / k;
    (0..k).find_map(|j| {
        let block = &hits[j * m..(j + 1) * m];
        let mut found = block.iter().filter(|h| **h != Hit::Miss);
        match (found.next(), found.next()) {
            (Some(&h), None) => Some((j, h)),
            _ => None,
        }
    })
}

#[derive(Default)]
struct Acc {
    num: Vec<BigInt>,
    den: Vec<BigInt>,
}

impl Acc {
    fn new(k: usize) -> Self {
        Acc {
            num: vec![BigInt::zero(); k],
            den: vec![BigInt::zero(); k],
        }
    }

    fn ratios(&self) -> Vec<Option<Rational>> {
        self.num
            .iter()
            .zip(&self.den)
            .map(|(n, d)| (!d.is_zero()).then(|| Rational::new(n.clone(), d.clone())))
            .collect()
    }
}

fn max_defined(v: &[Option<Rational>]) -> Rational {
    v.iter().flatten().max().cloned().unwrap_or_else(Rational::zero)
}

/// Measures `c₁, c₂, c₃` and `E_H(T′₀)` by exact enumeration of the
/// gadget's randomness and checks them against the completeness chain.
pub fn completeness_bound(
    g: &WeightedGraph,
    s: &VertexSubset,
    params: &GadgetParams,
    budget: Budget,
) -> Result<CompletenessAudit> {
    let n = g.n();
    let eta = edge_expansion(g, s)?;
    if params.ell > 16 {
        return Err(Error::invalid("exact audit supports ell <= 16"));
    }
    let gamma = gamma_kernel(g, &params.eps_v)?;
    let (r, k, ell) = (params.r, params.k, params.ell);
    let block_len = params.block_len();

    // Per-coordinate reduced states and their probabilities.
    let inv_n = Rational::one() / from_usize(n);
    let mut states: Vec<(Reduced, Rational)> = Vec::new();
    for a_in in [false, true] {
        let members: Vec<usize> = (0..n).filter(|&a| s.contains(a) == a_in).collect();
        for mask in 0..1u32 << ell {
            let p_mask: Rational = members
                .iter()
                .map(|&a| {
                    let q: Rational = s.iter().map(|b| gamma.p(a, b)).sum();
                    (0..ell)
                        .map(|p| {
                            if mask >> p & 1 == 1 {
                                q.clone()
                            } else {
                                Rational::one() - &q
                            }
                        })
                        .product::<Rational>()
                })
                .sum::<Rational>()
                * &inv_n;
            if p_mask.is_zero() {
                continue;
            }
            for (x, px) in omega_distribution(&params.omega) {
                for (in_d, pd) in d_distribution(&params.eps_t) {
                    states.push((Reduced { a_in, x, in_d, mask }, &p_mask * &px * &pd));
                }
            }
        }
    }
    let scaled = Scaled::new(states.iter().map(|(_, p)| p))?;
    let weights: Vec<BigInt> = scaled.numerators.iter().map(|&w| BigInt::from(w)).collect();
    let outcomes = (states.len() as u128).saturating_pow(r as u32);
    let per_outcome = (ell as u128) * 3u128.saturating_pow(r as u32);
    budget.check(outcomes.saturating_mul(per_outcome))?;

    let support = params.omega.support();
    let options = |st: &Reduced, p: usize| -> Vec<Hit> {
        let atoms: &[Atom] = if st.in_d { &support } else { std::slice::from_ref(&st.x) };
        let b_in = st.mask >> p & 1 == 1;
        let mut out: Vec<Hit> = atoms
            .iter()
            .map(|&a| match (a, b_in) {
                (Atom::Bot, _) | (_, false) => Hit::Miss,
                (Atom::Zero, true) => Hit::Zero,
                (Atom::One, true) => Hit::One,
            })
            .collect();
        out.sort_by_key(|h| *h as u8);
        out.dedup();
        out
    };

    let mut gt_prev = vec![BigInt::zero(); k];
    let mut eq = vec![BigInt::zero(); k];
    let mut c2 = Acc::new(k);
    let mut c2_empty = Acc::new(k);
    let mut c2_multi = Acc::new(k);
    let mut c3 = Acc::new(k);
    let mut uncut = BigInt::zero();
    let mut total = BigInt::zero();

    for combo in std::iter::repeat_n(0..states.len(), r).multi_cartesian_product() {
        let w: BigInt = combo.iter().map(|&i| &weights[i]).product();
        total += &w;
        let coords: Vec<Reduced> = combo.iter().map(|&i| states[i].0).collect();

        let w_counts: Vec<usize> = (0..k)
            .map(|j| {
                coords[j * block_len..(j + 1) * block_len]
                    .iter()
                    .filter(|c| c.a_in && !c.x.is_bot())
                    .count()
            })
            .collect();
        let j_star = w_counts.iter().position(|&c| c == 1);

        // Blocks achievable as j* by some member, and whether every member
        // lies in T′₀.
        let mut g_mask = 0u64;
        let mut inside = true;
        for p in 0..ell {
            let opts = coords.iter().map(|c| options(c, p));
            for hits in opts.multi_cartesian_product() {
                match first_singleton(&hits, k) {
                    Some((j, h)) => {
                        g_mask |= 1 << j;
                        inside &= h == Hit::Zero;
                    }
                    None => inside = false,
                }
            }
        }
        if inside {
            uncut += &w;
        }

        let star = j_star.unwrap_or(usize::MAX);
        for j in 0..k {
            let clear_before = g_mask & ((1u64 << j) - 1) == 0;
            if star >= j {
                gt_prev[j] += &w;
            }
            if star == j {
                eq[j] += &w;
                if clear_before {
                    c3.den[j] += &w;
                    if !inside {
                        c3.num[j] += &w;
                    }
                }
            }
            if star > j && clear_before {
                let hit = g_mask >> j & 1 == 1;
                let cases: [&mut Acc; 2] = if w_counts[j] == 0 {
                    [&mut c2, &mut c2_empty]
                } else {
                    [&mut c2, &mut c2_multi]
                };
                for acc in cases {
                    acc.den[j] += &w;
                    if hit {
                        acc.num[j] += &w;
                    }
                }
            }
        }
    }

    let c1_blocks: Vec<Option<Rational>> = eq
        .iter()
        .zip(&gt_prev)
        .map(|(e, d)| (!d.is_zero()).then(|| Rational::new(e.clone(), d.clone())))
        .collect();
    let delta = Rational::new(s.len().into(), n.into());
    let c1 = c1_formula(r, k, params.beta(), &delta);
    let c2_blocks = c2.ratios();
    let c3_blocks = c3.ratios();
    let c2v = max_defined(&c2_blocks);
    let c3v = max_defined(&c3_blocks);
    let bound = if c1.is_zero() {
        Rational::zero()
    } else {
        Rational::one() - &c3v - pow(&(Rational::one() - &c1), k) - &c2v / &c1
    };

    let two = int(2);
    let l = from_usize(ell);
    let (ev, et) = (&params.eps_v, &params.eps_t);
    let enter = &two * ev * &delta + &two * &eta * &delta;
    let empty_term = &l * &enter + et * (&delta + &l * &enter);
    let leave = &two * ev + &eta;
    let m = from_usize(block_len);
    Ok(CompletenessAudit {
        k,
        block_len,
        empty_case_bound: &m * &empty_term,
        multi_case_bound: &two * et + &two * &l * &leave,
        c3_bound: rational::ratio(1, 2) + et + &l * &leave + (&m - Rational::one()) * &empty_term,
        delta,
        eta,
        c1_blocks,
        c1,
        c2_blocks,
        c2_empty_blocks: c2_empty.ratios(),
        c2_multi_blocks: c2_multi.ratios(),
        c2: c2v,
        c3_blocks,
        c3: c3v,
        measured: Rational::new(uncut, total),
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::build::{build_gadget, GadgetMode};
    use crate::gadget::classify::CompletenessRule;
    use crate::gadget::space::OmegaBeta;
    use crate::rational::ratio;

    fn two_k2() -> WeightedGraph {
        let k2 = WeightedGraph::complete(2);
        k2.disjoint_union(&k2)
    }

    #[test]
    fn noiseless_planted_instance() {
        let g = two_k2();
        let s = VertexSubset::from_indices(4, [0, 1]).unwrap();
        let p = GadgetParams::new(2, 1, 1, int(0), int(0), OmegaBeta::new(ratio(1, 2)).unwrap()).unwrap();
        let audit = completeness_bound(&g, &s, &p, Budget::default()).unwrap();
        assert_eq!(audit.eta, int(0));
        assert_eq!(audit.c2, int(0));
        assert!(audit.c3 <= ratio(1, 2));
        assert!(audit.all_hold(), "{audit:?}");
    }

    #[test]
    fn measured_uncut_matches_hypergraph() {
        let g = WeightedGraph::cycle(4);
        let s = VertexSubset::from_indices(4, [0, 1]).unwrap();
        let p = GadgetParams::new(2, 2, 1, ratio(1, 5), ratio(1, 4), OmegaBeta::new(ratio(1, 2)).unwrap()).unwrap();
        let audit = completeness_bound(&g, &s, &p, Budget::default()).unwrap();
        let h = build_gadget(&g, &p, GadgetMode::Exact, Budget::default()).unwrap();
        let rule = CompletenessRule::new(s, 2);
        assert_eq!(h.uncut_mass(&rule.prime(Atom::Zero)), audit.measured);
        assert!(audit.all_hold(), "{audit:?}");
    }

    #[test]
    fn single_block_bound_is_algebraic() {
        let g = WeightedGraph::cycle(4);
        let s = VertexSubset::from_indices(4, [0, 1]).unwrap();
        let p = GadgetParams::new(2, 1, 1, ratio(1, 6), ratio(1, 6), OmegaBeta::new(ratio(2, 3)).unwrap()).unwrap();
        let a = completeness_bound(&g, &s, &p, Budget::default()).unwrap();
        assert_eq!(
            a.bound,
            Rational::one() - &a.c3 - (Rational::one() - &a.c1) - &a.c2 / &a.c1
        );
        assert!(a.c1_matches());
        assert!(a.chain_holds());
    }
}
