use serde::{Deserialize, Serialize};

use super::dalks::lex_less;
use super::{require_small, Budget};
use crate::error::{Error, Result};

/// Bipartite graph with sides `0..left` and `0..right`, stored as one
/// bitset row per left vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    rows: Vec<Vec<u64>>,
}

/// On-disk format: `{"L": int, "R": int, "edges": [[l, r], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteJson {
    #[serde(rename = "L")]
    pub left: usize,
    #[serde(rename = "R")]
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn empty(left: usize, right: usize) -> Self {
        BipartiteGraph {
            left,
            right,
            rows: vec![vec![0; right.div_ceil(64)]; left],
        }
    }

    pub fn new(left: usize, right: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(left, right);
        for (l, r) in edges {
            if l >= left || r >= right {
                return Err(Error::invalid(format!("edge ({l}, {r}) outside {left}x{right}")));
            }
            g.add_edge(l, r);
        }
        Ok(g)
    }

    pub fn complete(left: usize, right: usize) -> Self {
        let mut g = Self::empty(left, right);
        for l in 0..left {
            for r in 0..right {
                g.add_edge(l, r);
            }
        }
        g
    }

    pub(crate) fn add_edge(&mut self, l: usize, r: usize) {
        self.rows[l][r / 64] |= 1 << (r % 64);
    }

    /// Neighborhood of left vertex `l` as a bitset over the right side.
    pub(crate) fn row(&self, l: usize) -> &[u64] {
        &self.rows[l]
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.rows[l][r / 64] >> (r % 64) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|row| row.iter())
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.left).flat_map(move |l| {
            (0..self.right)
                .filter(move |&r| self.has_edge(l, r))
                .map(move |r| (l, r))
        })
    }

    /// Swaps the roles of the two sides.
    pub fn transpose(&self) -> BipartiteGraph {
        let mut t = Self::empty(self.right, self.left);
        for (l, r) in self.edges() {
            t.add_edge(r, l);
        }
        t
    }

    /// Whether every pair in `ls × rs` is an edge.
    pub fn is_biclique(&self, ls: &[usize], rs: &[usize]) -> bool {
        ls.iter().all(|&l| rs.iter().all(|&r| self.has_edge(l, r)))
    }

    pub fn to_json(&self) -> BipartiteJson {
        BipartiteJson {
            left: self.left,
            right: self.right,
            edges: self.edges().collect(),
        }
    }

    pub fn from_json(json: &BipartiteJson) -> Result<Self> {
        Self::new(json.left, json.right, json.edges.iter().copied())
    }
}

/// A biclique `S × T` with `S` on the left and `T` on the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biclique {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Biclique {
    pub fn edges(&self) -> usize {
        self.left.len() * self.right.len()
    }
}

/// Enumerates every subset of the smaller side together with its common
/// neighborhood on the other side. The callback sees `(small_mask, common)`
/// where `common` is a bitset over the large side.
fn for_each_common_neighborhood(g: &BipartiteGraph, budget: Budget, mut f: impl FnMut(u64, &[u64])) -> Result<()> {
    let small = g.left;
    require_small(small, "biclique")?;
    budget.check(1u128 << small)?;
    let mut full = vec![0u64; g.right.div_ceil(64)];
    for r in 0..g.right {
        full[r / 64] |= 1 << (r % 64);
    }

    fn go(g: &BipartiteGraph, v: usize, mask: u64, common: &[u64], f: &mut dyn FnMut(u64, &[u64])) {
        if v == g.left {
            f(mask, common);
            return;
        }
        let next: Vec<u64> = common.iter().zip(&g.rows[v]).map(|(a, b)| a & b).collect();
        go(g, v + 1, mask | 1 << v, &next, f);
        go(g, v + 1, mask, common, f);
    }

    go(g, 0, 0, &full, &mut f);
    Ok(())
}

fn bits(mask: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, w) in mask.iter().enumerate() {
        let mut w = *w;
        while w != 0 {
            out.push(i * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

fn mask_bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Maximum edge biclique: maximizes `|S| · |T|`.
pub fn solve_meb(g: &BipartiteGraph, budget: Budget) -> Result<Biclique> {
    let swapped = g.left > g.right;
    let h = if swapped { g.transpose() } else { g.clone() };
    let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    for_each_common_neighborhood(&h, budget, |mask, common| {
        if mask == 0 {
            return;
        }
        let (s, t) = (mask_bits(mask), bits(common));
        let value = s.len() * t.len();
        if value == 0 {
            return;
        }
        let better = match &best {
            None => true,
            Some((bv, bs, bt)) => value > *bv || (value == *bv && (&s, &t) < (bs, bt)),
        };
        if better {
            best = Some((value, s, t));
        }
    })?;
    let (s, t) = best.map(|(_, s, t)| (s, t)).unwrap_or_default();
    Ok(if swapped {
        Biclique { left: t, right: s }
    } else {
        Biclique { left: s, right: t }
    })
}

/// Maximum balanced biclique: the largest `t` with `K_{t,t} ⊆ G`, with a
/// witness of exactly `t` vertices per side.
pub fn solve_mbb(g: &BipartiteGraph, budget: Budget) -> Result<(usize, Biclique)> {
    let swapped = g.left > g.right;
    let h = if swapped { g.transpose() } else { g.clone() };
    let mut best: Option<(usize, u64, Vec<usize>)> = None;
    for_each_common_neighborhood(&h, budget, |mask, common| {
        let size = mask.count_ones() as usize;
        let t = bits(common);
        if size == 0 || t.len() < size {
            return;
        }
        let better = match &best {
            None => true,
            Some((bt, bm, _)) => size > *bt || (size == *bt && lex_less(mask, *bm)),
        };
        if better {
            best = Some((size, mask, t[..size].to_vec()));
        }
    })?;
    let Some((t, mask, other)) = best else {
        return Ok((
            0,
            Biclique {
                left: vec![],
                right: vec![],
            },
        ));
    };
    let s = mask_bits(mask);
    let witness = if swapped {
        Biclique { left: other, right: s }
    } else {
        Biclique { left: s, right: other }
    };
    Ok((t, witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching(n: usize) -> BipartiteGraph {
        BipartiteGraph::new(n, n, (0..n).map(|i| (i, i))).unwrap()
    }

    fn k33_minus_matching() -> BipartiteGraph {
        BipartiteGraph::new(
            3,
            3,
            (0..3).flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j))),
        )
        .unwrap()
    }

    #[test]
    fn meb_examples() {
        assert_eq!(
            solve_meb(&BipartiteGraph::complete(2, 2), Budget::default())
                .unwrap()
                .edges(),
            4
        );
        assert_eq!(solve_meb(&matching(3), Budget::default()).unwrap().edges(), 1);
        // C6 as a 3+3 bipartite graph is K_{3,3} minus a perfect matching.
        let c6 = k33_minus_matching();
        let b = solve_meb(&c6, Budget::default()).unwrap();
        assert_eq!(b.edges(), 2);
        assert!(c6.is_biclique(&b.left, &b.right));
    }

    #[test]
    fn mbb_examples() {
        assert_eq!(
            solve_mbb(&BipartiteGraph::complete(3, 3), Budget::default()).unwrap().0,
            3
        );
        // K_{3,3} minus a perfect matching is C6, which has no 4-cycle.
        let (t, w) = solve_mbb(&k33_minus_matching(), Budget::default()).unwrap();
        assert_eq!(t, 1);
        assert!(k33_minus_matching().is_biclique(&w.left, &w.right));
        assert_eq!(solve_mbb(&BipartiteGraph::empty(3, 3), Budget::default()).unwrap().0, 0);
    }

    #[test]
    fn unbalanced_sides_are_handled() {
        let g = BipartiteGraph::new(5, 2, [(0, 0), (1, 0), (2, 0), (3, 0), (3, 1), (4, 1)]).unwrap();
        let b = solve_meb(&g, Budget::default()).unwrap();
        assert_eq!(b.edges(), 4);
        assert_eq!(b.right, vec![0]);
        assert!(g.is_biclique(&b.left, &b.right));
        let (t, w) = solve_mbb(&g, Budget::default()).unwrap();
        assert_eq!(t, 1);
        assert!(g.is_biclique(&w.left, &w.right));
    }

    #[test]
    fn json_roundtrip() {
        let g = k33_minus_matching();
        assert_eq!(BipartiteGraph::from_json(&g.to_json()).unwrap(), g);
    }
}
