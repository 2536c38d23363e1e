use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::gadget::{classifier_measure, Atom, OmegaBeta, VertexClassifier, VertexSpace};
use crate::oracles::Budget;
use crate::rational::{ratio, Rational};

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A pseudorandom `T ⊆ V_H` that is `Π_{R,k}`-invariant and merge-closed by
/// construction: membership hashes the multiset, per block, of the pairs
/// `(x_i, A_i)` with `A_i` erased where `x_i = ⊥`.
#[derive(Debug, Clone)]
pub struct InvariantClassifier {
    n: usize,
    k: usize,
    seed: u64,
    /// Membership probability per orbit is `density / 2^16`.
    density: u64,
    complement: bool,
}

impl InvariantClassifier {
    pub fn new(n: usize, k: usize, seed: u64, density: u64, complement: bool) -> Self {
        InvariantClassifier {
            n,
            k,
            seed,
            density,
            complement,
        }
    }

    /// Draws a density from `seed` and complements if needed so that
    /// `μ_H(T) ≤ 1/2`.
    pub fn random(n: usize, r: usize, k: usize, seed: u64, omega: &OmegaBeta, budget: Budget) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let density = rng.gen_range(1..1u64 << 16);
        let mut c = Self::new(n, k, rng.gen(), density, false);
        let space = VertexSpace::new(n, r)?;
        let mu = classifier_measure(&space, omega, &c, budget)?;
        if mu > ratio(1, 2) {
            c.complement = true;
        }
        Ok(c)
    }

    /// `μ_H(T)` (a convenience over [`classifier_measure`]).
    pub fn measure(&self, r: usize, omega: &OmegaBeta, budget: Budget) -> Result<Rational> {
        classifier_measure(&VertexSpace::new(self.n, r)?, omega, self, budget)
    }

    fn key(&self, a: &[usize], x: &[Atom]) -> u64 {
        let m = a.len() / self.k;
        let mut h = self.seed;
        for j in 0..self.k {
            let mut pairs: Vec<(usize, usize)> = (j * m..(j + 1) * m)
                .map(|i| (x[i].code(), if x[i].is_bot() { self.n } else { a[i] }))
                .collect();
            pairs.sort_unstable();
            for (xc, av) in pairs {
                h = splitmix(h ^ (xc as u64 * 0x1_0000 + av as u64));
            }
            h = splitmix(h ^ 0xb10c);
        }
        h
    }
}

impl VertexClassifier for InvariantClassifier {
    fn contains(&self, a: &[usize], x: &[Atom]) -> bool {
        ((self.key(a, x) & 0xffff) < self.density) ^ self.complement
    }
}

/// Whether `t` is `Π_{R,k}`-invariant and merge-closed on all of `V_H`,
/// checked against generators.
pub fn is_invariant_and_merge_closed(
    t: &dyn VertexClassifier,
    n: usize,
    r: usize,
    k: usize,
    budget: Budget,
) -> Result<bool> {
    let space = VertexSpace::new(n, r)?;
    budget.check(space.vertex_count() as u128 * r as u128 * n.max(1) as u128)?;
    let m = r / k;
    for v in 0..space.vertex_count() {
        let (a, x) = space.decode(v);
        let here = t.contains(&a, &x);
        for i in 0..r.saturating_sub(1) {
            if i / m != (i + 1) / m {
                continue;
            }
            let (mut a2, mut x2) = (a.clone(), x.clone());
            a2.swap(i, i + 1);
            x2.swap(i, i + 1);
            if t.contains(&a2, &x2) != here {
                return Ok(false);
            }
        }
        for i in (0..r).filter(|&i| x[i].is_bot()) {
            let mut a2 = a.clone();
            for y in 0..n {
                a2[i] = y;
                if t.contains(&a2, &x) != here {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_classifiers_are_invariant_and_small() {
        let omega = OmegaBeta::new(ratio(1, 2)).unwrap();
        for seed in 0..5 {
            let c = InvariantClassifier::random(3, 2, 1, seed, &omega, Budget::default()).unwrap();
            assert!(is_invariant_and_merge_closed(&c, 3, 2, 1, Budget::default()).unwrap());
            assert!(c.measure(2, &omega, Budget::default()).unwrap() <= ratio(1, 2));
        }
    }

    #[test]
    fn detects_non_invariant_sets() {
        let first = |a: &[usize], _: &[Atom]| a[0] == 0;
        assert!(!is_invariant_and_merge_closed(&first, 2, 2, 1, Budget::default()).unwrap());
    }
}
