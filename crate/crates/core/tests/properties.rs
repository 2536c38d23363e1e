use proptest::prelude::*;

use ssered::fourier::{fourier_expand, test_accept, FunctionTable};
use ssered::graph::{cut_weight, edge_expansion, VertexSubset};
use ssered::harness::{gen_planted, random_regular, PlantedSseSpec, Report};
use ssered::oracles::{stirling2, SetPartitions};
use ssered::rational::{from_usize, int, ratio, Rational};
use ssered::ug::{apply_perm, compose, inverse};
use ssered::Budget;

fn probs(weights: &[i64]) -> Vec<Rational> {
    let total: i64 = weights.iter().sum();
    weights.iter().map(|&w| ratio(w, total)).collect()
}

/// `(r, atom weights, values)` for a random table on `Ω^r`.
fn table() -> impl Strategy<Value = FunctionTable> {
    (1usize..=3, prop::collection::vec(1i64..=5, 2..=3)).prop_flat_map(|(r, w)| {
        let size = w.len().pow(r as u32);
        prop::collection::vec(any::<bool>(), size).prop_map(move |v| FunctionTable::new(r, probs(&w), v).unwrap())
    })
}

fn perm(r: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..r).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn parseval(f in table()) {
        let e = fourier_expand(&f, Budget::default()).unwrap();
        prop_assert_eq!(e.total_mass(), f.mean());
    }

    #[test]
    fn low_degree_influence_sum(f in table()) {
        let e = fourier_expand(&f, Budget::default()).unwrap();
        for d in 0..=f.r() {
            let sum: Rational = e.influences(d).iter().sum();
            prop_assert!(sum <= from_usize(d));
        }
    }

    #[test]
    fn dropping_a_function_never_lowers_acceptance(
        values in prop::collection::vec(prop::collection::vec(any::<bool>(), 9), 1..=3),
        eps in 0i64..=4,
    ) {
        let fs: Vec<FunctionTable> = values
            .into_iter()
            .map(|v| FunctionTable::new(2, probs(&[1, 1, 2]), v).unwrap())
            .collect();
        let eps_t = ratio(eps, 4);
        let all = test_accept(&fs, &eps_t, Budget::default()).unwrap();
        for skip in 0..fs.len() {
            let rest: Vec<_> = fs.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, f)| f.clone()).collect();
            prop_assert!(test_accept(&rest, &eps_t, Budget::default()).unwrap() >= all);
        }
    }

    #[test]
    fn permutation_algebra(p in perm(5), q in perm(5), a in prop::collection::vec(0u8..10, 5)) {
        prop_assert_eq!(apply_perm(&compose(&p, &q), &a), apply_perm(&p, &apply_perm(&q, &a)));
        prop_assert_eq!(apply_perm(&inverse(&p), &apply_perm(&p, &a)), a);
    }

    #[test]
    fn random_regular_is_regular(n in 2usize..=9, perms in 1usize..=4, seed in any::<u64>()) {
        let g = random_regular(n, perms, seed).unwrap();
        prop_assert_eq!(g.regular_degree().unwrap(), from_usize(perms));
    }

    #[test]
    fn cut_is_symmetric(n in 2usize..=9, seed in any::<u64>(), mask in 1u64..255) {
        let g = random_regular(n, 2, seed).unwrap();
        let s = VertexSubset::from_mask(n, mask & ((1 << n) - 1));
        prop_assume!(!s.is_empty() && !s.is_full());
        prop_assert_eq!(cut_weight(&g, &s), cut_weight(&g, &s.complement()));
        prop_assert_eq!(edge_expansion(&g, &s).unwrap(), edge_expansion(&g, &s.complement()).unwrap());
    }

    #[test]
    fn planted_set_has_requested_expansion(half in 2usize..=6, phi in 0i64..=8, seed in any::<u64>()) {
        let n = 2 * half;
        let spec = PlantedSseSpec::new(n, ratio(1, 2), ratio(phi, 8), seed);
        let (g, s) = gen_planted(&spec).unwrap();
        prop_assert_eq!(s.len(), half);
        prop_assert_eq!(g.regular_degree().unwrap(), int(1));
        prop_assert_eq!(edge_expansion(&g, &s).unwrap(), ratio(phi, 8));
    }

    #[test]
    fn set_partition_count(n in 1usize..=8, k in 1usize..=8) {
        let all: Vec<Vec<usize>> = SetPartitions::new(n, k).collect();
        prop_assert_eq!(all.len() as u128, stirling2(n, k));
        prop_assert!(all.iter().all(|a| (0..k).all(|b| a.contains(&b))));
    }

    #[test]
    fn report_json_round_trip(rows in prop::collection::vec((-20i64..20, 1i64..9, -20i64..20, 1i64..9), 0..6)) {
        let mut r = Report::new("prop", "00", 1, Budget::default().0);
        for (i, (a, b, c, d)) in rows.into_iter().enumerate() {
            r.check(format!("row{i}"), ratio(a, b), ssered::harness::Relation::Le, ratio(c, d));
        }
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        prop_assert!(back.recheck().is_ok());
        prop_assert_eq!(back.all_pass(), r.all_pass());
        prop_assert_eq!(back.rows.len(), r.rows.len());
    }
}
