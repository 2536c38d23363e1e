use std::cmp::Ordering;

use super::{require_small, Budget, ScaledGraph};
use crate::error::{Error, Result};
use crate::graph::{VertexSubset, WeightedGraph};
use crate::rational::{from_usize, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct DalksSolution {
    pub set: VertexSubset,
    pub density: Rational,
}

/// Densest at-least-k subgraph: maximizes `internal_weight(S) / |S|` over
/// all `S` with `|S| >= k`.
pub fn solve_dalks(g: &WeightedGraph, k: usize, budget: Budget) -> Result<DalksSolution> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    require_small(n, "DALkS")?;
    budget.check(1u128 << n)?;
    let sg = ScaledGraph::new(g)?;

    struct Search<'a> {
        sg: &'a ScaledGraph,
        k: usize,
        best: Option<(i128, usize, u64)>,
    }

    impl Search<'_> {
        // Vertices are decided in order; `weight` is the scaled internal
        // weight of the chosen prefix set.
        fn go(&mut self, v: usize, mask: u64, size: usize, weight: i128) {
            let n = self.sg.n;
            if size + (n - v) < self.k {
                return;
            }
            if v == n {
                self.offer(mask, size, weight);
                return;
            }
            let mut add = self.sg.w(v, v);
            for u in 0..v {
                if mask >> u & 1 == 1 {
                    add += self.sg.w(u, v);
                }
            }
            self.go(v + 1, mask | 1 << v, size + 1, weight + add);
            self.go(v + 1, mask, size, weight);
        }

        fn offer(&mut self, mask: u64, size: usize, weight: i128) {
            let better = match &self.best {
                None => true,
                Some((bw, bs, bm)) => match (weight * *bs as i128).cmp(&(bw * size as i128)) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => lex_less(mask, *bm),
                },
            };
            if better {
                self.best = Some((weight, size, mask));
            }
        }
    }

    let mut search = Search { sg: &sg, k, best: None };
    search.go(0, 0, 0, 0);
    let (weight, size, mask) = search.best.expect("k <= n admits a set");
    Ok(DalksSolution {
        set: VertexSubset::from_mask(n, mask),
        density: sg.unscale(weight) / from_usize(size),
    })
}

/// Lexicographic order of the sorted member lists of two bitmasks.
pub(crate) fn lex_less(a: u64, b: u64) -> bool {
    let mut a = a;
    let mut b = b;
    loop {
        match (a == 0, b == 0) {
            (true, true) => return false,
            (true, false) => return true,
            (false, true) => return false,
            _ => {}
        }
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x < y;
        }
        a &= a - 1;
        b &= b - 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::internal_weight;
    use crate::rational::{int, ratio};

    #[test]
    fn dalks_examples() {
        let k4 = WeightedGraph::complete(4);
        let sol = solve_dalks(&k4, 2, Budget::default()).unwrap();
        assert_eq!(sol.density, ratio(6, 4));
        assert!(sol.set.is_full());

        let empty = WeightedGraph::new(5, []).unwrap();
        let sol = solve_dalks(&empty, 3, Budget::default()).unwrap();
        assert_eq!(sol.density, int(0));
        assert_eq!(sol.set.to_vec(), vec![0, 1, 2]);

        let tri_iso = WeightedGraph::complete(3).disjoint_union(&WeightedGraph::new(1, []).unwrap());
        let sol = solve_dalks(&tri_iso, 1, Budget::default()).unwrap();
        assert_eq!(sol.density, int(1));
        assert_eq!(sol.set.to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn dalks_matches_plain_enumeration() {
        let g = WeightedGraph::new(
            5,
            [
                (0, 1, ratio(1, 2)),
                (1, 2, int(3)),
                (2, 3, ratio(2, 3)),
                (3, 4, int(1)),
                (4, 4, int(2)),
            ],
        )
        .unwrap();
        for k in 1..=5 {
            let sol = solve_dalks(&g, k, Budget::default()).unwrap();
            let brute = (1u64..32)
                .map(|m| VertexSubset::from_mask(5, m))
                .filter(|s| s.len() >= k)
                .map(|s| internal_weight(&g, &s) / from_usize(s.len()))
                .max()
                .unwrap();
            assert_eq!(sol.density, brute, "k = {k}");
        }
    }

    #[test]
    fn lex_order_on_masks() {
        // {0} < {0,1} < {0,2} < {1}
        assert!(lex_less(0b001, 0b011));
        assert!(lex_less(0b011, 0b101));
        assert!(lex_less(0b101, 0b010));
        assert!(!lex_less(0b010, 0b010));
    }
}
