use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::VertexSubset;
use crate::oracles::{BipartiteGraph, Budget};
use crate::rational::Rational;

/// Product parameters. `k` defaults to `⌈log₂ n⌉` and the tuple count `N`
/// to `⌈(1/δ)^k⌉` with `δ = 2^{−4/ε}`, i.e. `N = ⌈2^{4k/ε}⌉`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplifyParams {
    pub eps: Rational,
    pub k: Option<usize>,
    pub n_tuples: Option<usize>,
}

impl AmplifyParams {
    pub fn new(eps: Rational) -> Self {
        AmplifyParams {
            eps,
            k: None,
            n_tuples: None,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_tuples(mut self, n: usize) -> Self {
        self.n_tuples = Some(n);
        self
    }

    /// Resolves `(k, N)` for a base graph with `n` vertices per side.
    pub fn resolve(&self, n: usize, budget: Budget) -> Result<(usize, usize)> {
        if !self.eps.is_positive() {
            return Err(Error::invalid("epsilon must be positive"));
        }
        let k = self.k.unwrap_or_else(|| ceil_log2(n).max(1));
        if k == 0 {
            return Err(Error::invalid("tuple length k must be positive"));
        }
        let tuples = match self.n_tuples {
            Some(t) => t as u128,
            None => ceil_pow2(&(Rational::from_integer((4 * k).into()) / &self.eps)),
        };
        budget.check(tuples.saturating_mul(tuples))?;
        Ok((k, tuples as usize))
    }
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// `⌈2^e⌉` for a positive rational `e`, saturating at `u128::MAX`.
pub fn ceil_pow2(e: &Rational) -> u128 {
    let (p, q) = (e.numer(), e.denom());
    let upper_exp = p.div_ceil(q);
    let Some(upper_exp) = upper_exp.to_u32().filter(|&x| x < 127) else {
        return u128::MAX;
    };
    let q = q.to_u32().unwrap_or(u32::MAX);
    let target = BigInt::one() << p.to_usize().unwrap_or(usize::MAX);
    // Smallest N with N^q >= 2^p.
    let (mut lo, mut hi) = (1u128, 1u128 << upper_exp);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if BigInt::from(mid).pow(q) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

#[derive(Debug, Clone)]
pub struct Amplified {
    pub graph: BipartiteGraph,
    pub left: Vec<Vec<usize>>,
    pub right: Vec<Vec<usize>>,
    pub k: usize,
}

/// Randomized graph product: `N` i.i.d. uniform `k`-tuples per side, and
/// `(U, V)` adjacent iff every `U_a` is adjacent to every `V_b`.
///
/// Tuple `i` on the left uses ChaCha stream `2i` and on the right stream
/// `2i + 1`, so any single tuple can be regenerated from the seed alone.
pub fn amplify_biclique(g: &BipartiteGraph, params: &AmplifyParams, seed: u64, budget: Budget) -> Result<Amplified> {
    let n = g.left();
    if g.right() != n {
        return Err(Error::invalid("amplification needs |L| = |R|"));
    }
    if n == 0 {
        return Err(Error::invalid("empty base graph"));
    }
    let (k, count) = params.resolve(n, budget)?;
    let left: Vec<_> = (0..count).map(|i| draw_tuple(seed, 2 * i as u64, n, k)).collect();
    let right: Vec<_> = (0..count).map(|i| draw_tuple(seed, 2 * i as u64 + 1, n, k)).collect();
    let words = n.div_ceil(64);
    let mut out = BipartiteGraph::empty(count, count);
    for (i, u) in left.iter().enumerate() {
        let mut common = vec![u64::MAX; words];
        for &a in u {
            for (c, r) in common.iter_mut().zip(g.row(a)) {
                *c &= r;
            }
        }
        for (j, v) in right.iter().enumerate() {
            if v.iter().all(|&b| common[b / 64] >> (b % 64) & 1 == 1) {
                out.add_edge(i, j);
            }
        }
    }
    Ok(Amplified {
        graph: out,
        left,
        right,
        k,
    })
}

pub fn draw_tuple(seed: u64, stream: u64, n: usize, k: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..k).map(|_| rng.gen_range(0..n)).collect()
}

/// `𝓕(A)`: every coordinate of every tuple in `A`.
pub fn flatten<'a>(tuples: impl IntoIterator<Item = &'a Vec<usize>>, n: usize) -> Result<VertexSubset> {
    VertexSubset::from_indices(n, tuples.into_iter().flatten().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn default_parameters() {
        assert_eq!(ceil_log2(32), 5);
        assert_eq!(ceil_log2(33), 6);
        assert_eq!(ceil_pow2(&int(3)), 8);
        assert_eq!(ceil_pow2(&ratio(1, 2)), 2);
        assert_eq!(ceil_pow2(&ratio(3, 2)), 3);
        let p = AmplifyParams::new(int(4));
        // ε = 4: δ = 1/2, k = 2 for n = 4, N = 2^2 = 4.
        assert_eq!(p.resolve(4, Budget::default()).unwrap(), (2, 4));
        let huge = AmplifyParams::new(ratio(1, 2));
        assert!(matches!(
            huge.resolve(32, Budget::default()),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn complete_and_empty_bases() {
        let p = AmplifyParams::new(int(1)).with_k(2).with_tuples(6);
        let full = amplify_biclique(&BipartiteGraph::complete(3, 3), &p, 1, Budget::default()).unwrap();
        assert_eq!(full.graph, BipartiteGraph::complete(6, 6));
        let none = amplify_biclique(&BipartiteGraph::empty(3, 3), &p, 1, Budget::default()).unwrap();
        assert_eq!(none.graph.edge_count(), 0);
    }

    #[test]
    fn planted_tuples_are_adjacent_and_seeded() {
        let mut g = BipartiteGraph::empty(4, 4);
        for l in 0..2 {
            for r in 0..2 {
                g.add_edge(l, r);
            }
        }
        let p = AmplifyParams::new(int(1)).with_k(2).with_tuples(40);
        let a = amplify_biclique(&g, &p, 9, Budget::default()).unwrap();
        for (i, u) in a.left.iter().enumerate() {
            for (j, v) in a.right.iter().enumerate() {
                let inside = u.iter().all(|&x| x < 2) && v.iter().all(|&y| y < 2);
                assert_eq!(a.graph.has_edge(i, j), inside);
            }
        }
        let b = amplify_biclique(&g, &p, 9, Budget::default()).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.left[3], draw_tuple(9, 6, 4, 2));
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(flatten(&[vec![0, 1]], 3).unwrap().to_vec(), vec![0, 1]);
        assert_eq!(flatten(&[vec![1, 1]], 3).unwrap().to_vec(), vec![1]);
        assert_eq!(flatten(&[vec![0, 1], vec![1, 2]], 3).unwrap().to_vec(), vec![0, 1, 2]);
    }
}
