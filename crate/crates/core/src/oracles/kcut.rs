use num_traits::Zero;

use super::{Budget, ScaledGraph};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rational::Rational;

/// A partition of `0..n` into exactly `k` nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        let mut seen = vec![false; k];
        for &b in &assignment {
            if b >= k {
                return Err(Error::invalid(format!("block {b} outside 0..{k}")));
            }
            seen[b] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("block {empty} is empty")));
        }
        Ok(Partition { assignment, k })
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                if v >= n || assignment[v] != usize::MAX {
                    return Err(Error::invalid(format!("vertex {v} out of range or repeated")));
                }
                assignment[v] = b;
            }
        }
        if assignment.contains(&usize::MAX) {
            return Err(Error::invalid("blocks do not cover every vertex"));
        }
        Partition::new(assignment, blocks.len())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.k];
        for (v, &b) in self.assignment.iter().enumerate() {
            blocks[b].push(v);
        }
        blocks
    }

    /// Total weight of edges whose endpoints lie in different blocks.
    pub fn cut_weight(&self, g: &WeightedGraph) -> Rational {
        g.edges()
            .iter()
            .filter(|(u, v, _)| self.assignment[*u] != self.assignment[*v])
            .map(|(_, _, w)| w)
            .sum()
    }
}

/// Stirling number of the second kind, saturating at `u128::MAX`.
pub fn stirling2(n: usize, k: usize) -> u128 {
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = (j as u128).saturating_mul(row[j]).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}

/// All partitions of `0..n` into exactly `k` nonempty blocks, as
/// restricted growth strings in lexicographic order.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    n: usize,
    k: usize,
    current: Option<Vec<usize>>,
    started: bool,
}

impl SetPartitions {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if k == 0 || k > n {
            None
        } else {
            let mut a = vec![0; n];
            for (b, slot) in a[n - k + 1..].iter_mut().enumerate() {
                *slot = b + 1;
            }
            Some(a)
        };
        SetPartitions {
            n,
            k,
            current,
            started: false,
        }
    }

    fn advance(&mut self) {
        let Some(a) = self.current.as_mut() else {
            return;
        };
        let (n, k) = (self.n, self.k);
        let mut prefix_max = vec![0; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(a[i - 1]);
        }
        for i in (1..n).rev() {
            let m = prefix_max[i];
            let top = (m + 1).min(k - 1);
            let remaining = n - 1 - i;
            for c in a[i] + 1..=top {
                let used = m.max(c) + 1;
                if k - used <= remaining {
                    a[i] = c;
                    let zeros = remaining - (k - used);
                    for j in 0..remaining {
                        a[i + 1 + j] = if j < zeros { 0 } else { used + (j - zeros) };
                    }
                    return;
                }
            }
        }
        self.current = None;
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.started {
            self.advance();
        }
        self.started = true;
        self.current.clone()
    }
}

/// Exact minimum k-cut by branch-and-bound over restricted growth strings.
pub fn solve_min_kcut(g: &WeightedGraph, k: usize, budget: Budget) -> Result<(Partition, Rational)> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(Error::invalid(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let states = (1..=k).fold(0u128, |acc, j| acc.saturating_add(stirling2(n, j)));
    budget.check(states)?;
    let sg = ScaledGraph::new(g)?;

    struct Search<'a> {
        sg: &'a ScaledGraph,
        k: usize,
        a: Vec<usize>,
        best: Option<(i128, Vec<usize>)>,
    }

    impl Search<'_> {
        fn go(&mut self, i: usize, used: usize, cost: i128) {
            let n = self.sg.n;
            if let Some((b, _)) = &self.best {
                if cost >= *b {
                    return;
                }
            }
            if i == n {
                if used == self.k {
                    self.best = Some((cost, self.a.clone()));
                }
                return;
            }
            if self.k - used > n - i {
                return;
            }
            for b in 0..=used.min(self.k - 1) {
                let mut extra = 0;
                for u in 0..i {
                    if self.a[u] != b {
                        extra += self.sg.w(u, i);
                    }
                }
                self.a[i] = b;
                self.go(i + 1, used.max(b + 1), cost + extra);
            }
        }
    }

    let mut search = Search {
        sg: &sg,
        k,
        a: vec![0; n],
        best: None,
    };
    search.go(0, 0, 0);
    let (cost, assignment) = search.best.expect("k <= n admits a partition");
    let value = if cost == 0 { Rational::zero() } else { sg.unscale(cost) };
    Ok((Partition::new(assignment, k)?, value))
}
