use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gadget::{Atom, GadgetParams, OmegaBeta, VertexClassifier, VertexSpace};
use crate::graph::{decode_tuple, WeightedGraph};
use crate::oracles::Budget;
use crate::rational::{self, from_usize, int, pow, ratio, Rational};
use crate::ug::{gamma_kernel, CoordinateKernel};

/// `Γ = T_V ∘ G ∘ T_V` as a per-coordinate kernel.
pub type GammaKernel = CoordinateKernel;

/// `μ_A = Pr_{x ∼ Ω^R}[(A, x) ∈ T]` for every `A ∈ V^R`, by rank of `A`.
pub fn mu_table(
    n: usize,
    r: usize,
    omega: &OmegaBeta,
    t: &dyn VertexClassifier,
    budget: Budget,
) -> Result<Vec<Rational>> {
    let space = VertexSpace::new(n, r)?;
    budget.check(space.vertex_count() as u128)?;
    let xs: Vec<(Vec<Atom>, Rational)> = (0..space.atom_count())
        .map(|i| {
            let x: Vec<Atom> = decode_tuple(i, 3, r).into_iter().map(Atom::from_code).collect();
            let p = omega.p_tuple(&x);
            (x, p)
        })
        .filter(|(_, p)| !p.is_zero())
        .collect();
    Ok((0..space.tuple_count())
        .map(|ai| {
            let a = decode_tuple(ai, n, r);
            xs.iter().filter(|(x, _)| t.contains(&a, x)).map(|(_, p)| p).sum()
        })
        .collect())
}

/// `out[A] = Σ_B ∏_i K(A_i, B_i) · v[B]`, one coordinate at a time.
pub fn apply_tensor_kernel(kernel: &CoordinateKernel, r: usize, v: &[Rational]) -> Vec<Rational> {
    let n = kernel.n();
    let size = v.len();
    let mut cur = v.to_vec();
    let mut stride = 1;
    for _ in 0..r {
        let mut next = vec![Rational::zero(); size];
        for base in 0..size {
            if (base / stride) % n != 0 {
                continue;
            }
            for a in 0..n {
                let mut acc = Rational::zero();
                for b in 0..n {
                    let p = kernel.p(a, b);
                    if !p.is_zero() {
                        acc += p * &cur[base + b * stride];
                    }
                }
                next[base + a * stride] = acc;
            }
        }
        cur = next;
        stride *= n;
    }
    cur
}

/// `E_{B̃ ∼ Γ(A)} μ_{B̃}` for a single `A`.
pub fn gamma_mean(
    t: &dyn VertexClassifier,
    g: &WeightedGraph,
    params: &GadgetParams,
    a: &[usize],
    budget: Budget,
) -> Result<Rational> {
    let means = gamma_means(t, g, params, budget)?;
    Ok(means[crate::graph::encode_tuple(a, g.n())].clone())
}

fn gamma_means(
    t: &dyn VertexClassifier,
    g: &WeightedGraph,
    params: &GadgetParams,
    budget: Budget,
) -> Result<Vec<Rational>> {
    let mu = mu_table(g.n(), params.r, &params.omega, t, budget)?;
    let gamma = gamma_kernel(g, &params.eps_v)?;
    Ok(apply_tensor_kernel(&gamma, params.r, &mu))
}

/// The variance statement and the bad-`A` bound for a classifier `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanStatistics {
    pub mu_h: Rational,
    pub beta: Rational,
    /// `E_A (E_{B̃ ∼ Γ(A)} μ_{B̃} − μ_H(T))²`.
    pub variance: Rational,
    /// `Pr_A[E_{B̃ ∼ Γ(A)} μ_{B̃} ≥ 9/10]`.
    pub bad_fraction: Rational,
}

impl MeanStatistics {
    pub fn variance_holds(&self) -> bool {
        self.variance <= self.beta
    }

    /// `Pr_A[…] ≤ 10β`; the statement assumes `μ_H(T) ≤ 1/2`.
    pub fn bad_fraction_holds(&self) -> bool {
        self.bad_fraction <= int(10) * &self.beta
    }
}

pub fn mean_statistics(
    t: &dyn VertexClassifier,
    g: &WeightedGraph,
    params: &GadgetParams,
    budget: Budget,
) -> Result<MeanStatistics> {
    let means = gamma_means(t, g, params, budget)?;
    let count = from_usize(means.len());
    let mu_h: Rational = means.iter().sum::<Rational>() / &count;
    let variance = means
        .iter()
        .map(|m| {
            let d = m - &mu_h;
            &d * &d
        })
        .sum::<Rational>()
        / &count;
    let bad = means.iter().filter(|m| **m >= ratio(9, 10)).count();
    Ok(MeanStatistics {
        mu_h,
        beta: params.beta().clone(),
        variance,
        bad_fraction: from_usize(bad) / count,
    })
}

/// The good-tuple probability
/// `Pr_{A, B̃¹…B̃ℓ ∼ Γ(A)}[|{i : μ_{B̃ⁱ} ≤ 99/100}| ≥ t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub probability: Rational,
    pub t: usize,
    pub ell: usize,
    pub beta: Rational,
    pub statistics: MeanStatistics,
}

impl TailReport {
    /// `probability ≥ 1 − 10β − 2^{−ℓ/100}`, decided exactly as
    /// `y ≤ 0 ∨ y^100 · 2^ℓ ≤ 1` with `y = 1 − 10β − probability`.
    pub fn tail_bound_holds(&self) -> bool {
        let y = Rational::one() - int(10) * &self.beta - &self.probability;
        if !y.is_positive() {
            return true;
        }
        pow(&y, 100) * Rational::from_integer(BigInt::one() << self.ell) <= Rational::one()
    }

    /// Whether `t ≤ ℓ/100`, the regime the tail bound is stated for.
    pub fn in_stated_regime(&self) -> bool {
        100 * self.t <= self.ell
    }
}

fn binomial(n: usize, k: usize) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| acc * from_usize(n - i) / from_usize(i + 1))
}

pub fn tail_fraction(
    t_class: &dyn VertexClassifier,
    g: &WeightedGraph,
    params: &GadgetParams,
    t: usize,
    budget: Budget,
) -> Result<TailReport> {
    let statistics = mean_statistics(t_class, g, params, budget)?;
    if statistics.mu_h > ratio(1, 2) {
        return Err(Error::PreconditionViolated(format!(
            "mu_H(T) = {} exceeds 1/2",
            rational::format(&statistics.mu_h)
        )));
    }
    let mu = mu_table(g.n(), params.r, &params.omega, t_class, budget)?;
    let low: Vec<Rational> = mu
        .iter()
        .map(|m| {
            if *m <= ratio(99, 100) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let gamma = gamma_kernel(g, &params.eps_v)?;
    let q = apply_tensor_kernel(&gamma, params.r, &low);
    let ell = params.ell;
    let mut total = Rational::zero();
    for qa in &q {
        let miss = Rational::one() - qa;
        for c in t..=ell {
            total += binomial(ell, c) * pow(qa, c) * pow(&miss, ell - c);
        }
    }
    Ok(TailReport {
        probability: total / from_usize(q.len()),
        t,
        ell,
        beta: params.beta().clone(),
        statistics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::OmegaBeta;

    fn params(eps_v: Rational) -> GadgetParams {
        GadgetParams::new(2, 1, 2, ratio(1, 4), eps_v, OmegaBeta::new(ratio(1, 2)).unwrap()).unwrap()
    }

    #[test]
    fn everything_has_mean_one() {
        let g = WeightedGraph::cycle(4);
        let all = |_: &[usize], _: &[Atom]| true;
        let m = gamma_mean(&all, &g, &params(ratio(1, 3)), &[0, 1], Budget::default()).unwrap();
        assert_eq!(m, int(1));
    }

    #[test]
    fn full_noise_makes_means_constant() {
        let g = WeightedGraph::cycle(4);
        let first_in = |a: &[usize], x: &[Atom]| x[0] != Atom::Bot && a[0] < 2;
        let stats = mean_statistics(&first_in, &g, &params(int(1)), Budget::default()).unwrap();
        assert_eq!(stats.variance, int(0));
        assert!(stats.variance_holds());
    }

    #[test]
    fn tail_trivial_cases() {
        let g = WeightedGraph::cycle(4);
        let none = |_: &[usize], _: &[Atom]| false;
        let p = params(ratio(1, 3));
        assert_eq!(
            tail_fraction(&none, &g, &p, 2, Budget::default()).unwrap().probability,
            int(1)
        );
        let some = |a: &[usize], x: &[Atom]| x[1] == Atom::Zero && a[1] == 0;
        assert_eq!(
            tail_fraction(&some, &g, &p, 0, Budget::default()).unwrap().probability,
            int(1)
        );
        let all = |_: &[usize], _: &[Atom]| true;
        assert!(matches!(
            tail_fraction(&all, &g, &p, 1, Budget::default()),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn tail_bound_and_regime() {
        let g = WeightedGraph::cycle(4);
        let p = params(ratio(1, 3));
        let none = |_: &[usize], _: &[Atom]| false;
        let r = tail_fraction(&none, &g, &p, 2, Budget::default()).unwrap();
        assert!(r.tail_bound_holds());
        // t = 2 needs ℓ ≥ 200 to be in the stated regime.
        assert!(!r.in_stated_regime());
        let zero = tail_fraction(&none, &g, &p, 0, Budget::default()).unwrap();
        assert!(zero.in_stated_regime());
    }
}
