use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::classify::VertexClassifier;
use super::params::GadgetParams;
use super::space::{Atom, OmegaBeta, VertexSpace};
use crate::error::{Error, Result};
use crate::graph::{decode_tuple, sample_index, WeightedGraph};
use crate::oracles::{Budget, ExplicitHypergraph};
use crate::rational::{from_usize, Rational};
use crate::ug::{apply_perm, gamma_kernel, CoordinateKernel, NoiseKernel, Perm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetMode {
    /// Exact hyperedge distribution.
    Exact,
    /// `count` i.i.d. hyperedges, each of weight `1/count`.
    Sample { seed: u64, count: usize },
}

/// The weighted hypergraph on `V_H = V^R × Ω^R` produced by the gadget.
///
/// Vertices are indexed as in [`VertexSpace`]; each hyperedge is a sorted
/// list of vertex indices with its probability.
#[derive(Debug, Clone)]
pub struct GadgetHypergraph {
    space: VertexSpace,
    params: GadgetParams,
    exact: bool,
    hyperedges: Vec<(Vec<usize>, Rational)>,
}

/// Outcome of the closure checks over every hyperedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureReport {
    pub edges: usize,
    pub perm_closed: usize,
    pub merge_closed: usize,
}

impl ClosureReport {
    pub fn all_closed(&self) -> bool {
        self.perm_closed == self.edges && self.merge_closed == self.edges
    }
}

/// Per-coordinate options `(B′_i, x′_i)` of a hyperedge drawn from
/// `x_i`, `i ∈ D` and `B̃_i`.
fn coordinate_options(n: usize, support: &[Atom], x: Atom, in_d: bool, b: usize) -> Vec<(usize, Atom)> {
    let atoms: &[Atom] = if in_d { support } else { std::slice::from_ref(&x) };
    atoms
        .iter()
        .flat_map(|&a| {
            if a.is_bot() {
                (0..n).map(|v| (v, Atom::Bot)).collect_vec()
            } else {
                vec![(b, a)]
            }
        })
        .collect()
}

/// `{π(B′, x′) | p, π ∈ Π, x′ ∈ C_D(x), B′ ∈ M_{x′}(B̃ᵖ)}` as sorted vertex
/// indices.
fn hyperedge(
    space: &VertexSpace,
    support: &[Atom],
    perms: &[Perm],
    x: &[Atom],
    d: &[bool],
    bts: &[Vec<usize>],
) -> Vec<usize> {
    let mut members = Vec::new();
    for bt in bts {
        let options = (0..space.r).map(|i| coordinate_options(space.n, support, x[i], d[i], bt[i]));
        for combo in options.multi_cartesian_product() {
            let (b, xs): (Vec<usize>, Vec<Atom>) = combo.into_iter().unzip();
            for pi in perms {
                members.push(space.encode(&apply_perm(pi, &b), &apply_perm(pi, &xs)));
            }
        }
    }
    members.sort_unstable();
    members.dedup();
    members
}

/// Largest possible hyperedge, for budgeting.
fn hyperedge_bound(n: usize, params: &GadgetParams, perms: usize) -> u128 {
    let support = params.omega.support();
    let per_coord = if params.eps_t.is_zero() {
        n.max(1)
    } else {
        support.iter().map(|a| if a.is_bot() { n } else { 1 }).sum()
    };
    (per_coord as u128)
        .saturating_pow(params.r as u32)
        .saturating_mul(perms as u128)
        .saturating_mul(params.ell as u128)
}

/// `Pr[i ∈ D]` and its complement, dropping zero entries.
pub(crate) fn d_distribution(eps_t: &Rational) -> Vec<(bool, Rational)> {
    [(false, Rational::one() - eps_t), (true, eps_t.clone())]
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

pub(crate) fn omega_distribution(omega: &OmegaBeta) -> Vec<(Atom, Rational)> {
    omega.support().into_iter().map(|a| (a, omega.p(a))).collect()
}

/// Builds the gadget hypergraph over the regular graph `g`.
pub fn build_gadget(
    g: &WeightedGraph,
    params: &GadgetParams,
    mode: GadgetMode,
    budget: Budget,
) -> Result<GadgetHypergraph> {
    g.regular_degree()?;
    let n = g.n();
    let space = VertexSpace::new(n, params.r)?;
    let perms = params.group().elements(budget)?;
    let support = params.omega.support();
    let edge_bound = hyperedge_bound(n, params, perms.len());
    let mut acc: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    let exact = mode == GadgetMode::Exact;
    match mode {
        GadgetMode::Exact => {
            let gamma = gamma_kernel(g, &params.eps_v)?;
            let states = coordinate_states(n, params, &gamma);
            let outcomes = (states.len() as u128).saturating_pow(params.r as u32);
            budget.check(outcomes.saturating_mul(edge_bound))?;
            for combo in std::iter::repeat_n(0..states.len(), params.r).multi_cartesian_product() {
                let mut p = Rational::one();
                for &s in &combo {
                    p *= &states[s].p;
                }
                let x: Vec<Atom> = combo.iter().map(|&s| states[s].x).collect();
                let d: Vec<bool> = combo.iter().map(|&s| states[s].in_d).collect();
                let bts: Vec<Vec<usize>> = (0..params.ell)
                    .map(|q| combo.iter().map(|&s| states[s].b[q]).collect())
                    .collect();
                let e = hyperedge(&space, &support, &perms, &x, &d, &bts);
                *acc.entry(e).or_insert_with(Rational::zero) += p;
            }
        }
        GadgetMode::Sample { seed, count } => {
            if count == 0 {
                return Err(Error::invalid("sample count must be positive"));
            }
            budget.check((count as u128).saturating_mul(edge_bound))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = NoiseKernel::new(n, params.eps_v.clone())?;
            let dists: Vec<_> = (0..n).map(|v| g.neighbor_distribution(v)).collect();
            let omega = omega_distribution(&params.omega);
            let d_dist = d_distribution(&params.eps_t);
            let w = Rational::new(1.into(), count.into());
            for _ in 0..count {
                let a: Vec<usize> = (0..params.r).map(|_| rng.gen_range(0..n)).collect();
                let bts: Vec<Vec<usize>> = (0..params.ell)
                    .map(|_| {
                        a.iter()
                            .map(|&ai| {
                                let at = noise.sample(&mut rng, ai);
                                let b = sample_index(&mut rng, &dists[at]);
                                noise.sample(&mut rng, b)
                            })
                            .collect()
                    })
                    .collect();
                let x: Vec<Atom> = (0..params.r).map(|_| sample_index(&mut rng, &omega)).collect();
                let d: Vec<bool> = (0..params.r).map(|_| sample_index(&mut rng, &d_dist)).collect();
                let e = hyperedge(&space, &support, &perms, &x, &d, &bts);
                *acc.entry(e).or_insert_with(Rational::zero) += &w;
            }
        }
    }
    Ok(GadgetHypergraph {
        space,
        params: params.clone(),
        exact,
        hyperedges: acc.into_iter().collect(),
    })
}

/// One coordinate of the exact enumeration with `A` marginalized:
/// `(x_i, i ∈ D, B̃¹_i, …, B̃ℓ_i)`.
struct CoordState {
    x: Atom,
    in_d: bool,
    b: Vec<usize>,
    p: Rational,
}

fn coordinate_states(n: usize, params: &GadgetParams, gamma: &CoordinateKernel) -> Vec<CoordState> {
    let inv_n = Rational::one() / from_usize(n);
    let mut b_dist = Vec::new();
    for bi in 0..n.pow(params.ell as u32) {
        let b = decode_tuple(bi, n, params.ell);
        let p: Rational = (0..n)
            .map(|a| b.iter().map(|&y| gamma.p(a, y)).product::<Rational>())
            .sum::<Rational>()
            * &inv_n;
        if !p.is_zero() {
            b_dist.push((b, p));
        }
    }
    let mut states = Vec::new();
    for (x, px) in omega_distribution(&params.omega) {
        for (in_d, pd) in d_distribution(&params.eps_t) {
            for (b, pb) in &b_dist {
                states.push(CoordState {
                    x,
                    in_d,
                    b: b.clone(),
                    p: &px * &pd * pb,
                });
            }
        }
    }
    states
}

/// `μ_H(T)` for a rule-based `T`, by enumeration of `V_H`.
pub fn classifier_measure(
    space: &VertexSpace,
    omega: &OmegaBeta,
    t: &dyn VertexClassifier,
    budget: Budget,
) -> Result<Rational> {
    budget.check(space.vertex_count() as u128)?;
    let mut total = Rational::zero();
    for xi in 0..space.atom_count() {
        let x: Vec<Atom> = decode_tuple(xi, 3, space.r).into_iter().map(Atom::from_code).collect();
        let px = omega.p_tuple(&x);
        if px.is_zero() {
            continue;
        }
        let hits = (0..space.tuple_count())
            .filter(|&ai| t.contains(&decode_tuple(ai, space.n, space.r), &x))
            .count();
        total += px * from_usize(hits);
    }
    Ok(total / from_usize(space.tuple_count()))
}

impl GadgetHypergraph {
    pub fn space(&self) -> &VertexSpace {
        &self.space
    }

    pub fn params(&self) -> &GadgetParams {
        &self.params
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn vertex_count(&self) -> usize {
        self.space.vertex_count()
    }

    pub fn hyperedges(&self) -> &[(Vec<usize>, Rational)] {
        &self.hyperedges
    }

    pub fn total_probability(&self) -> Rational {
        self.hyperedges.iter().map(|(_, p)| p).sum()
    }

    pub fn vertex_measure(&self, v: usize) -> Rational {
        let (_, x) = self.space.decode(v);
        self.space.measure(&self.params.omega, &x)
    }

    pub fn measure(&self, t: &dyn VertexClassifier, budget: Budget) -> Result<Rational> {
        classifier_measure(&self.space, &self.params.omega, t, budget)
    }

    /// `E_H(T)`: total probability of hyperedges inside `T`. In sample mode
    /// this is the empirical fraction.
    pub fn uncut_mass(&self, t: &dyn VertexClassifier) -> Rational {
        let mut cache: HashMap<usize, bool> = HashMap::new();
        let mut inside = |v: usize| {
            *cache.entry(v).or_insert_with(|| {
                let (a, x) = self.space.decode(v);
                t.contains(&a, &x)
            })
        };
        self.hyperedges
            .iter()
            .filter(|(e, _)| e.iter().all(|&v| inside(v)))
            .map(|(_, p)| p)
            .sum()
    }

    /// Checks every hyperedge for closure under the adjacent in-block
    /// transpositions (which generate `Π_{R,k}`) and under single-coordinate
    /// changes of `A` at `⊥` positions (which generate `M_x(A)`).
    pub fn closure_report(&self) -> ClosureReport {
        let group = self.params.group();
        let gens: Vec<Perm> = (0..self.params.r.saturating_sub(1))
            .filter(|&i| group.block_of(i) == group.block_of(i + 1))
            .map(|i| {
                let mut p: Perm = (0..self.params.r).collect();
                p.swap(i, i + 1);
                p
            })
            .collect();
        let n = self.space.n;
        let mut report = ClosureReport {
            edges: self.hyperedges.len(),
            perm_closed: 0,
            merge_closed: 0,
        };
        for (e, _) in &self.hyperedges {
            let has = |v: usize| e.binary_search(&v).is_ok();
            let mut perm_ok = true;
            let mut merge_ok = true;
            for &v in e {
                let (a, x) = self.space.decode(v);
                perm_ok &= gens
                    .iter()
                    .all(|g| has(self.space.encode(&apply_perm(g, &a), &apply_perm(g, &x))));
                for i in (0..a.len()).filter(|&i| x[i].is_bot()) {
                    let mut b = a.clone();
                    for y in 0..n {
                        b[i] = y;
                        merge_ok &= has(self.space.encode(&b, &x));
                    }
                }
            }
            report.perm_closed += perm_ok as usize;
            report.merge_closed += merge_ok as usize;
        }
        report
    }

    /// The hypergraph with explicit vertex measures.
    pub fn to_explicit(&self, budget: Budget) -> Result<ExplicitHypergraph> {
        budget.check(self.vertex_count() as u128)?;
        let measures = (0..self.vertex_count()).map(|v| self.vertex_measure(v)).collect();
        ExplicitHypergraph::new(measures, self.hyperedges.clone())
    }
}
