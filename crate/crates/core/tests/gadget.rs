use ssered::gadget::{
    build_gadget, completeness_bound, to_unweighted, Atom, CompletenessRule, GadgetMode, GadgetParams, OmegaBeta,
};
use ssered::graph::VertexSubset;
use ssered::oracles::uncut_fraction;
use ssered::rational::{int, ratio};
use ssered::{Budget, WeightedGraph};

fn cycle_pair_settings() -> Vec<(WeightedGraph, VertexSubset, GadgetParams)> {
    let k2 = WeightedGraph::complete(2);
    let graphs = vec![
        (k2.disjoint_union(&k2), vec![0, 1]),
        (WeightedGraph::cycle(4), vec![0, 1]),
        (WeightedGraph::complete(3), vec![0]),
        (WeightedGraph::cycle(6), vec![0, 1, 2]),
    ];
    let mut out = Vec::new();
    for (g, s) in graphs {
        let s = VertexSubset::from_indices(g.n(), s).unwrap();
        for (r, k, ell) in [(2, 1, 1), (2, 2, 1), (2, 1, 2), (3, 1, 1)] {
            for (et, ev, beta) in [(int(0), int(0), ratio(1, 2)), (ratio(1, 8), ratio(1, 10), ratio(2, 3))] {
                let p = GadgetParams::new(r, k, ell, et.clone(), ev.clone(), OmegaBeta::new(beta.clone()).unwrap())
                    .unwrap();
                out.push((g.clone(), s.clone(), p));
            }
        }
    }
    out
}

#[test]
fn completeness_chain_sweep() {
    for (g, s, p) in cycle_pair_settings() {
        let a = completeness_bound(&g, &s, &p, Budget::default()).unwrap();
        assert!(a.all_hold(), "n={} p={p:?} audit={a:?}", g.n());
    }
}

#[test]
fn completeness_sides_balance() {
    let g = WeightedGraph::cycle(4);
    let s = VertexSubset::from_indices(4, [0, 1]).unwrap();
    let p = GadgetParams::new(2, 2, 1, ratio(1, 4), ratio(1, 4), OmegaBeta::new(ratio(1, 2)).unwrap()).unwrap();
    let h = build_gadget(&g, &p, GadgetMode::Exact, Budget::default()).unwrap();
    let rule = CompletenessRule::new(s, 2);
    let b = Budget::default();
    assert_eq!(
        h.measure(&rule.prime(Atom::Zero), b).unwrap(),
        h.measure(&rule.prime(Atom::One), b).unwrap()
    );
    assert_eq!(h.measure(&rule.part(Atom::Zero), b).unwrap(), ratio(1, 2));
    assert_eq!(h.measure(&rule.part(Atom::One), b).unwrap(), ratio(1, 2));
}

#[test]
fn unweighted_copy_preserves_uncut_mass() {
    let g = WeightedGraph::complete(2);
    let p = GadgetParams::new(2, 1, 1, ratio(1, 2), ratio(1, 2), OmegaBeta::new(ratio(1, 2)).unwrap()).unwrap();
    let h = build_gadget(&g, &p, GadgetMode::Exact, Budget::default()).unwrap();
    let explicit = h.to_explicit(Budget::default()).unwrap();
    let u = to_unweighted(&explicit, &num_bigint::BigInt::from(1u64 << 40)).unwrap();
    let rule = CompletenessRule::new(VertexSubset::from_indices(2, [0]).unwrap(), 1);
    let t0 = rule.part(Atom::Zero);
    let members: Vec<usize> = (0..h.vertex_count())
        .filter(|&v| {
            let (a, x) = h.space().decode(v);
            ssered::gadget::VertexClassifier::contains(&t0, &a, &x)
        })
        .collect();
    let t = VertexSubset::from_indices(h.vertex_count(), members).unwrap();
    assert_eq!(uncut_fraction(&u.hypergraph, &u.lift(&t).unwrap()), h.uncut_mass(&t0));
}
