use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::table::{candidate_set, FunctionTable};
use crate::error::{Error, Result};
use crate::gadget::{default_kappa, zeta, Atom, GadgetParams, VertexClassifier, DEFAULT_D};
use crate::graph::{decode_tuple, edge_expansion, encode_tuple, sample_index, VertexSubset, WeightedGraph};
use crate::oracles::{random_assignment_value, ug_value, Budget};
use crate::rational::{self, from_usize, Rational};
use crate::ug::{gamma_kernel, UniqueGame};

/// Decoder inputs beyond the gadget: the influence threshold `κ`, degree
/// `d` and the soundness level `γ` used only for the reported target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeParams {
    #[serde(with = "rational::serde_str")]
    pub kappa: Rational,
    pub d: usize,
    #[serde(with = "rational::serde_str")]
    pub gamma: Rational,
}

impl Default for DecodeParams {
    fn default() -> Self {
        DecodeParams {
            kappa: default_kappa(),
            d: DEFAULT_D,
            gamma: rational::ratio(1, 6),
        }
    }
}

impl DecodeParams {
    /// `γκ² / (4d²ℓ²)`.
    pub fn target(&self, ell: usize) -> Rational {
        zeta(&self.gamma, &self.kappa, self.d, ell)
    }
}

/// `f_A(x) = [(A, x) ∈ T]` over the support of `Ω`.
pub fn slice_table(
    t: &dyn VertexClassifier,
    a: &[usize],
    params: &GadgetParams,
    budget: Budget,
) -> Result<FunctionTable> {
    let support = params.omega.support();
    let probs = support.iter().map(|&s| params.omega.p(s)).collect();
    FunctionTable::from_fn(params.r, probs, budget, |xi| {
        let x: Vec<Atom> = xi.iter().map(|&i| support[i]).collect();
        t.contains(a, &x)
    })
}

/// `cand[A]` for every `A ∈ V^R`, by rank.
pub fn candidate_sets(
    t: &dyn VertexClassifier,
    n: usize,
    params: &GadgetParams,
    dp: &DecodeParams,
    budget: Budget,
) -> Result<Vec<Vec<usize>>> {
    let tuples = (n as u128).saturating_pow(params.r as u32);
    budget.check(tuples)?;
    (0..tuples as usize)
        .map(|ai| {
            let f = slice_table(t, &decode_tuple(ai, n, params.r), params, budget)?;
            candidate_set(&f, &dp.kappa, dp.d, budget)
        })
        .collect()
}

/// Exact law of `F(A)`: `labels[j]` is the probability of drawing label
/// `j` from a candidate set; `fallback` is the mass that lands on the
/// empty-candidate default (label 0).
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    pub labels: Vec<Rational>,
    pub fallback: Rational,
}

impl LabelDistribution {
    pub fn full(&self) -> Vec<Rational> {
        let mut out = self.labels.clone();
        out[0] += &self.fallback;
        out
    }
}

/// `F(A)` is a uniform element of `cand[A]` with probability 1/2, and of
/// `cand[B̃]` for `B̃ ∼ Γ(A)` otherwise.
pub fn label_distributions(
    g: &WeightedGraph,
    params: &GadgetParams,
    cands: &[Vec<usize>],
) -> Result<Vec<LabelDistribution>> {
    let (n, r) = (g.n(), params.r);
    let gamma = gamma_kernel(g, &params.eps_v)?;
    let half = rational::ratio(1, 2);
    let own: Vec<LabelDistribution> = cands
        .iter()
        .map(|c| {
            let mut labels = vec![Rational::zero(); r];
            if c.is_empty() {
                return LabelDistribution {
                    labels,
                    fallback: Rational::from_integer(1.into()),
                };
            }
            let w = Rational::new(1.into(), c.len().into());
            for &j in c {
                labels[j] += &w;
            }
            LabelDistribution {
                labels,
                fallback: Rational::zero(),
            }
        })
        .collect();
    let mut out = Vec::with_capacity(cands.len());
    for ai in 0..cands.len() {
        let a = decode_tuple(ai, n, r);
        let mut labels: Vec<Rational> = own[ai].labels.iter().map(|p| p * &half).collect();
        let mut fallback = &own[ai].fallback * &half;
        for (bi, ob) in own.iter().enumerate() {
            let b = decode_tuple(bi, n, r);
            let p: Rational = a.iter().zip(&b).map(|(&x, &y)| gamma.p(x, y).clone()).product();
            if p.is_zero() {
                continue;
            }
            let p = p * &half;
            for (slot, q) in labels.iter_mut().zip(&ob.labels) {
                if !q.is_zero() {
                    *slot += &p * q;
                }
            }
            fallback += &p * &ob.fallback;
        }
        out.push(LabelDistribution { labels, fallback });
    }
    Ok(out)
}

/// Exact `E_F[val(F)]` for independently drawn labels.
pub fn expected_ug_value(u: &UniqueGame, dists: &[LabelDistribution]) -> Rational {
    let full: Vec<Vec<Rational>> = dists.iter().map(|d| d.full()).collect();
    let total = u.total_weight();
    if total.is_zero() {
        return total;
    }
    let mut sum = Rational::zero();
    for e in u.edges() {
        let hit: Rational = if e.u == e.v {
            (0..u.r())
                .filter(|&l| e.perm[l] == l)
                .map(|l| full[e.u][l].clone())
                .sum()
        } else {
            (0..u.r()).map(|l| &full[e.u][l] * &full[e.v][e.perm[l]]).sum()
        };
        sum += &e.weight * hit;
    }
    sum / total
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub labels: Vec<usize>,
    /// `val(F)` of the sampled assignment.
    pub value: Rational,
    /// `E_F[val(F)]` over the decoder's randomness.
    pub expected_value: Rational,
    /// Value of a uniformly random assignment, in expectation.
    pub random_value: Rational,
    /// `γκ²/(4d²ℓ²)`, reported only.
    pub target: Rational,
    pub empty_candidates: usize,
}

/// Decodes a unique-games assignment on `V^R` from `T` and scores it on
/// `u`, whose vertices must be the tuples of `V^R` by rank.
pub fn decode_assignment(
    t: &dyn VertexClassifier,
    g: &WeightedGraph,
    params: &GadgetParams,
    dp: &DecodeParams,
    u: &UniqueGame,
    seed: u64,
    budget: Budget,
) -> Result<Decoded> {
    let n = g.n();
    if u.vertex_count() != n.pow(params.r as u32) || u.r() != params.r {
        return Err(Error::invalid("unique game does not live on V^R with R labels"));
    }
    let cands = candidate_sets(t, n, params, dp, budget)?;
    let gamma = gamma_kernel(g, &params.eps_v)?;
    let rows: Vec<Vec<(usize, Rational)>> = (0..n).map(|a| gamma.row(a)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = Vec::with_capacity(cands.len());
    for ai in 0..cands.len() {
        let source = if rng.gen_bool(0.5) {
            ai
        } else {
            let a = decode_tuple(ai, n, params.r);
            let b: Vec<usize> = a.iter().map(|&x| sample_index(&mut rng, &rows[x])).collect();
            encode_tuple(&b, n)
        };
        let c = &cands[source];
        labels.push(if c.is_empty() { 0 } else { c[rng.gen_range(0..c.len())] });
    }
    let dists = label_distributions(g, params, &cands)?;
    Ok(Decoded {
        value: ug_value(u, &labels)?,
        expected_value: expected_ug_value(u, &dists),
        random_value: random_assignment_value(u),
        target: dp.target(params.ell),
        empty_candidates: cands.iter().filter(|c| c.is_empty()).count(),
        labels,
    })
}

/// Checks a set against the small-set conclusion: size fraction in
/// `[ζ/(16R), 3k/(ε_V R)]` and `Φ(S) ≤ 1 − ζ/(16k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCheck {
    pub fraction: Rational,
    pub lo: Rational,
    /// `None` when `ε_V = 0` (no upper limit).
    pub hi: Option<Rational>,
    pub expansion: Rational,
    pub bound: Rational,
}

impl WitnessCheck {
    pub fn degenerate(&self) -> bool {
        self.hi.as_ref().is_some_and(|hi| *hi < self.lo)
    }

    pub fn in_window(&self) -> bool {
        self.fraction >= self.lo && self.hi.as_ref().is_none_or(|hi| self.fraction <= *hi)
    }

    pub fn meets_bound(&self) -> bool {
        self.expansion <= self.bound
    }

    pub fn passes(&self) -> bool {
        !self.degenerate() && self.in_window() && self.meets_bound()
    }

    /// Why the check fails, if it does.
    pub fn reason(&self) -> Option<&'static str> {
        if self.degenerate() {
            Some("size window is empty")
        } else if !self.in_window() {
            Some("size outside window")
        } else if !self.meets_bound() {
            Some("expansion above bound")
        } else {
            None
        }
    }
}

pub fn check_small_set_witness(
    g: &WeightedGraph,
    s: &VertexSubset,
    zeta: &Rational,
    r: usize,
    k: usize,
    eps_v: &Rational,
) -> Result<WitnessCheck> {
    if r == 0 || k == 0 {
        return Err(Error::invalid("R and k must be positive"));
    }
    let expansion = edge_expansion(g, s)?;
    let r_q = from_usize(r);
    Ok(WitnessCheck {
        fraction: Rational::new(s.len().into(), g.n().into()),
        lo: zeta / (rational::int(16) * &r_q),
        hi: eps_v.is_positive().then(|| from_usize(3 * k) / (eps_v * &r_q)),
        expansion,
        bound: Rational::from_integer(1.into()) - zeta / from_usize(16 * k),
    })
}
