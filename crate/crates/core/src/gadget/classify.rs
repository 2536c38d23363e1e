use super::space::Atom;
use crate::graph::{encode_tuple, VertexSubset};

/// Membership rule on `V_H`, evaluated per vertex.
pub trait VertexClassifier {
    fn contains(&self, a: &[usize], x: &[Atom]) -> bool;
}

impl<F: Fn(&[usize], &[Atom]) -> bool> VertexClassifier for F {
    fn contains(&self, a: &[usize], x: &[Atom]) -> bool {
        self(a, x)
    }
}

/// The planted-set rule: `W(A, x, j)` collects the coordinates of block `j`
/// with `A_i ∈ S` and `x_i ≠ ⊥`; `j*` is the first block where it is a
/// singleton `{i*}`, and `(A, x)` goes to side `x_{i*}`.
#[derive(Debug, Clone)]
pub struct CompletenessRule {
    s: VertexSubset,
    k: usize,
}

impl CompletenessRule {
    pub fn new(s: VertexSubset, k: usize) -> Self {
        CompletenessRule { s, k }
    }

    pub fn set(&self) -> &VertexSubset {
        &self.s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `W(A, x, j)` with `j` zero-based.
    pub fn w(&self, a: &[usize], x: &[Atom], j: usize) -> Vec<usize> {
        let m = a.len() / self.k;
        (j * m..(j + 1) * m)
            .filter(|&i| self.s.contains(a[i]) && !x[i].is_bot())
            .collect()
    }

    /// `(j*, i*)`, zero-based; `None` stands for `−1`.
    pub fn star(&self, a: &[usize], x: &[Atom]) -> Option<(usize, usize)> {
        (0..self.k).find_map(|j| {
            let w = self.w(a, x, j);
            (w.len() == 1).then(|| (j, w[0]))
        })
    }

    /// Side in `T′₀`/`T′₁`, or `None` for leftover vertices.
    pub fn prime_side(&self, a: &[usize], x: &[Atom]) -> Option<Atom> {
        self.star(a, x).map(|(_, i)| x[i])
    }

    /// Side in the full bisection. Leftovers pair `(A, x)` with `(A, x̄)`:
    /// the one whose first non-`⊥` atom is `0` joins `T₀`. All-`⊥` leftovers
    /// join `T₀` when `rank(A) < n^R / 2`.
    pub fn side(&self, a: &[usize], x: &[Atom]) -> Atom {
        if let Some(side) = self.prime_side(a, x) {
            return side;
        }
        match x.iter().find(|a| !a.is_bot()) {
            Some(&first) => first,
            None => {
                let n = self.s.universe();
                let rank = encode_tuple(a, n) as u128;
                if 2 * rank < (n as u128).pow(a.len() as u32) {
                    Atom::Zero
                } else {
                    Atom::One
                }
            }
        }
    }

    /// `T′_side` for `side ∈ {0, 1}`.
    pub fn prime(&self, side: Atom) -> impl VertexClassifier + '_ {
        move |a: &[usize], x: &[Atom]| self.prime_side(a, x) == Some(side)
    }

    /// `T_side` for `side ∈ {0, 1}`.
    pub fn part(&self, side: Atom) -> impl VertexClassifier + '_ {
        move |a: &[usize], x: &[Atom]| self.side(a, x) == side
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Atom::*;

    fn rule(n: usize, s: &[usize], k: usize) -> CompletenessRule {
        CompletenessRule::new(VertexSubset::from_indices(n, s.iter().copied()).unwrap(), k)
    }

    #[test]
    fn rule_examples() {
        let r = rule(2, &[0], 2);
        assert_eq!(r.star(&[0, 1], &[Bot, Bot]), None);
        // A = (s, t), x = (1, ⊥): W(·, 1) = {1}, side 1.
        assert_eq!(r.w(&[0, 1], &[One, Bot], 0), vec![0]);
        assert_eq!(r.star(&[0, 1], &[One, Bot]), Some((0, 0)));
        assert_eq!(r.prime_side(&[0, 1], &[One, Bot]), Some(One));
        let single_block = rule(2, &[0], 1);
        assert_eq!(single_block.star(&[0, 0], &[Zero, One]), None);
    }

    #[test]
    fn leftovers_pair_with_flipped_atoms() {
        let r = rule(2, &[0], 1);
        assert_eq!(r.side(&[0, 0], &[Zero, One]), Zero);
        assert_eq!(r.side(&[0, 0], &[One, Zero]), One);
        assert_eq!(r.side(&[0, 1], &[Bot, Bot]), Zero);
        assert_eq!(r.side(&[1, 0], &[Bot, Bot]), One);
    }
}
