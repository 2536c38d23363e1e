use itertools::Itertools;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{decode_tuple, encode_tuple};
use crate::oracles::Budget;
use crate::rational::{from_usize, ratio, Rational};

/// One coordinate of `x ∈ Ω^R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    Zero,
    One,
    Bot,
}

impl Atom {
    pub const ALL: [Atom; 3] = [Atom::Zero, Atom::One, Atom::Bot];

    pub fn code(self) -> usize {
        match self {
            Atom::Zero => 0,
            Atom::One => 1,
            Atom::Bot => 2,
        }
    }

    pub fn from_code(c: usize) -> Atom {
        Atom::ALL[c]
    }

    /// Swaps `0 ↔ 1` and fixes `⊥`.
    pub fn flip(self) -> Atom {
        match self {
            Atom::Zero => Atom::One,
            Atom::One => Atom::Zero,
            Atom::Bot => Atom::Bot,
        }
    }

    pub fn is_bot(self) -> bool {
        self == Atom::Bot
    }
}

/// `{0, 1, ⊥}_β`: atoms `0` and `1` with probability `β/2` each and `⊥`
/// with probability `1 − β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OmegaBeta {
    beta: Rational,
}

impl OmegaBeta {
    /// Requires `0 < β ≤ 2/3`, so every atom has probability at least `β/2`.
    pub fn new(beta: Rational) -> Result<Self> {
        if beta <= Rational::zero() || beta > ratio(2, 3) {
            return Err(Error::invalid(format!(
                "beta = {} outside (0, 2/3]",
                crate::rational::format(&beta)
            )));
        }
        Ok(OmegaBeta { beta })
    }

    /// Degenerate `β = 1`: uniform `{0, 1}` with no `⊥`, so merge sets are
    /// singletons.
    pub fn two_atom() -> Self {
        OmegaBeta { beta: Rational::one() }
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn is_two_atom(&self) -> bool {
        self.beta.is_one()
    }

    pub fn p(&self, a: Atom) -> Rational {
        match a {
            Atom::Zero | Atom::One => &self.beta / Rational::from_integer(2.into()),
            Atom::Bot => Rational::one() - &self.beta,
        }
    }

    /// Atoms of positive probability, in the order `0, 1, ⊥`.
    pub fn support(&self) -> Vec<Atom> {
        Atom::ALL.into_iter().filter(|&a| !self.p(a).is_zero()).collect()
    }

    /// Smallest positive atom probability.
    pub fn min_atom(&self) -> Rational {
        self.support()
            .into_iter()
            .map(|a| self.p(a))
            .min()
            .unwrap_or_else(Rational::zero)
    }

    /// `Pr[x]` under the product measure.
    pub fn p_tuple(&self, x: &[Atom]) -> Rational {
        x.iter().map(|&a| self.p(a)).product()
    }
}

/// `M_x(A)`: tuples agreeing with `A` wherever `x` is not `⊥`, in
/// lexicographic order.
pub fn merge_set(a: &[usize], x: &[Atom], n: usize, budget: Budget) -> Result<Vec<Vec<usize>>> {
    if a.len() != x.len() {
        return Err(Error::invalid("A and x must have the same length"));
    }
    let free = x.iter().filter(|a| a.is_bot()).count();
    budget.check((n as u128).saturating_pow(free as u32))?;
    Ok(a.iter()
        .zip(x)
        .map(|(&ai, xi)| if xi.is_bot() { (0..n).collect_vec() } else { vec![ai] })
        .multi_cartesian_product()
        .collect())
}

/// `C_D(x)`: tuples over the support of `omega` agreeing with `x` outside
/// the coordinates flagged in `d`.
pub fn subcube(x: &[Atom], d: &[bool], omega: &OmegaBeta, budget: Budget) -> Result<Vec<Vec<Atom>>> {
    if x.len() != d.len() {
        return Err(Error::invalid("x and D must have the same length"));
    }
    let support = omega.support();
    let free = d.iter().filter(|&&b| b).count();
    budget.check((support.len() as u128).saturating_pow(free as u32))?;
    Ok(x.iter()
        .zip(d)
        .map(|(&xi, &di)| if di { support.clone() } else { vec![xi] })
        .multi_cartesian_product()
        .collect())
}

/// Index arithmetic for `V_H = V^R × Ω^R`. Vertex `(A, x)` has index
/// `rank(A) · 3^R + rank(x)` with atoms ranked `0, 1, ⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexSpace {
    pub n: usize,
    pub r: usize,
}

impl VertexSpace {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        let total = (n as u128)
            .checked_pow(r as u32)
            .and_then(|a| a.checked_mul(3u128.checked_pow(r as u32)?))
            .filter(|&t| t <= usize::MAX as u128);
        if n == 0 || total.is_none() {
            return Err(Error::Overflow);
        }
        Ok(VertexSpace { n, r })
    }

    pub fn tuple_count(&self) -> usize {
        self.n.pow(self.r as u32)
    }

    pub fn atom_count(&self) -> usize {
        3usize.pow(self.r as u32)
    }

    pub fn vertex_count(&self) -> usize {
        self.tuple_count() * self.atom_count()
    }

    pub fn encode(&self, a: &[usize], x: &[Atom]) -> usize {
        let xi = x.iter().fold(0, |acc, a| acc * 3 + a.code());
        encode_tuple(a, self.n) * self.atom_count() + xi
    }

    pub fn decode(&self, v: usize) -> (Vec<usize>, Vec<Atom>) {
        let a = decode_tuple(v / self.atom_count(), self.n, self.r);
        let x = decode_tuple(v % self.atom_count(), 3, self.r)
            .into_iter()
            .map(Atom::from_code)
            .collect();
        (a, x)
    }

    /// `μ_H({(A, x)}) = n^{-R} · Pr[x]`.
    pub fn measure(&self, omega: &OmegaBeta, x: &[Atom]) -> Rational {
        omega.p_tuple(x) / from_usize(self.tuple_count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn omega_probabilities() {
        let o = OmegaBeta::new(ratio(1, 2)).unwrap();
        let total: Rational = Atom::ALL.iter().map(|&a| o.p(a)).sum();
        assert_eq!(total, int(1));
        assert_eq!(o.min_atom(), ratio(1, 4));
        assert!(OmegaBeta::new(ratio(3, 4)).is_err());
        assert!(OmegaBeta::new(int(0)).is_err());
        let two = OmegaBeta::two_atom();
        assert_eq!(two.support(), vec![Atom::Zero, Atom::One]);
        assert_eq!(two.min_atom(), ratio(1, 2));
    }

    #[test]
    fn merge_set_examples() {
        use Atom::*;
        let b = Budget::default();
        assert_eq!(merge_set(&[1, 0], &[Zero, One], 2, b).unwrap(), vec![vec![1, 0]]);
        assert_eq!(merge_set(&[1, 0], &[Bot, Bot], 2, b).unwrap().len(), 4);
        assert_eq!(
            merge_set(&[1, 0], &[Zero, Bot], 2, b).unwrap(),
            vec![vec![1, 0], vec![1, 1]]
        );
    }

    #[test]
    fn subcube_examples() {
        use Atom::*;
        let o = OmegaBeta::new(ratio(1, 2)).unwrap();
        let b = Budget::default();
        assert_eq!(
            subcube(&[Zero, One], &[false, false], &o, b).unwrap(),
            vec![vec![Zero, One]]
        );
        assert_eq!(subcube(&[Bot], &[true], &o, b).unwrap().len(), 3);
        assert_eq!(
            subcube(&[Bot, One, Zero], &[true, false, true], &o, b).unwrap().len(),
            9
        );
    }

    #[test]
    fn vertex_encoding_roundtrip() {
        let space = VertexSpace::new(3, 2).unwrap();
        for v in 0..space.vertex_count() {
            let (a, x) = space.decode(v);
            assert_eq!(space.encode(&a, &x), v);
        }
        assert_eq!(space.encode(&[0, 0], &[Atom::Zero, Atom::Bot]), 2);
    }
}
