use crate::error::{Error, Result};
use crate::oracles::{Biclique, BipartiteGraph, Bisection, ExplicitHypergraph};

/// Both sides are the hyperedges of `h`; `(e₁, e₂)` is an edge iff the two
/// hyperedges are disjoint.
pub fn reduce_muchb_to_biclique(h: &ExplicitHypergraph) -> Result<BipartiteGraph> {
    let edges = h.hyperedges();
    if edges.is_empty() {
        return Err(Error::invalid("hypergraph has no hyperedges"));
    }
    let m = edges.len();
    let mut g = BipartiteGraph::empty(m, m);
    for (i, (a, _)) in edges.iter().enumerate() {
        for (j, (b, _)) in edges.iter().enumerate() {
            if disjoint(a, b) {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// Hyperedges inside `T₀` on the left and inside `T₁` on the right; they
/// form a biclique of the reduced graph.
pub fn bisection_biclique(h: &ExplicitHypergraph, b: &Bisection) -> Biclique {
    let inside = |t: &crate::graph::VertexSubset| -> Vec<usize> {
        h.hyperedges()
            .iter()
            .enumerate()
            .filter(|(_, (e, _))| e.iter().all(|&v| t.contains(v)))
            .map(|(i, _)| i)
            .collect()
    };
    Biclique {
        left: inside(&b.t0),
        right: inside(&b.t1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexSubset;
    use crate::oracles::{solve_mbb, Budget};

    #[test]
    fn reduction_examples() {
        let h = ExplicitHypergraph::unweighted(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g = reduce_muchb_to_biclique(&h).unwrap();
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert!(!g.has_edge(0, 0) && !g.has_edge(1, 1));
        assert_eq!(solve_mbb(&g, Budget::default()).unwrap().0, 1);

        let singletons = ExplicitHypergraph::unweighted(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        let g = reduce_muchb_to_biclique(&singletons).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_eq!(solve_mbb(&g, Budget::default()).unwrap().0, 1);

        let one = ExplicitHypergraph::unweighted(2, vec![vec![0, 1]]).unwrap();
        assert_eq!(reduce_muchb_to_biclique(&one).unwrap().edge_count(), 0);
    }

    #[test]
    fn bisection_gives_biclique() {
        let h = ExplicitHypergraph::unweighted(4, vec![vec![0, 1], vec![0], vec![2, 3], vec![1, 2]]).unwrap();
        let g = reduce_muchb_to_biclique(&h).unwrap();
        let b = Bisection::from_side(VertexSubset::from_indices(4, [0, 1]).unwrap());
        let bc = bisection_biclique(&h, &b);
        assert_eq!((bc.left.len(), bc.right.len()), (2, 1));
        assert!(g.is_biclique(&bc.left, &bc.right));
    }
}
