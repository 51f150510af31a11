//! Inclusion probabilities on the failure tree: exact values, bounds and sampling.

use ftinterface::blocktree::{
    antichains, check_final_bound, enumerate_patterns, exact_inclusion, mc_inclusion, mc_pattern_counts, node_weight,
    pattern_probability, sample_tree, BoundKind, Node, NodeSet, TreeParams,
};
use num::{BigRational, One, ToPrimitive};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn leaf_bound_on_full_grid() {
    for z in 2..=4 {
        let sets = antichains(z, 3, true);
        for db in [q(3, 10), q(1, 10), q(3, 100)] {
            let rows = check_final_bound(z, &db, &sets).unwrap();
            assert!(rows.iter().filter(|r| r.kind == BoundKind::Leaf).count() == sets.len());
            for r in &rows {
                assert!(r.holds, "z={z} δ̄={db} {} {:?}", r.set, r.kind);
            }
        }
    }
}

#[test]
fn general_antichains_meet_node_weight_bound() {
    for z in 2..=4 {
        for db in [q(3, 10), q(1, 10)] {
            let rows = check_final_bound(z, &db, &antichains(z, 3, false)).unwrap();
            assert!(rows.iter().all(|r| r.holds), "z={z}");
        }
    }
}

#[test]
fn sampled_inclusion_within_four_sigma() {
    let trials = 100_000u64;
    for z in 2..=4 {
        for db in [q(3, 10), q(1, 10)] {
            let params = TreeParams::analytic(z, &db).unwrap();
            let sets = antichains(z, 2, false);
            let counts = mc_inclusion(&params, &sets, trials, 77).unwrap();
            for (set, &k) in sets.iter().zip(&counts) {
                let p = exact_inclusion(&params, set).unwrap().to_f64().unwrap();
                let sigma = (p * (1.0 - p) / trials as f64).sqrt();
                let freq = k as f64 / trials as f64;
                assert!((freq - p).abs() <= 4.0 * sigma, "z={z} {} {freq} vs {p}", set.descriptor());
            }
        }
    }
}

#[test]
fn chain_rule_matches_sampled_pattern_frequencies() {
    let params = TreeParams::from_f64(&[0.2, 0.3]).unwrap();
    let pats = enumerate_patterns(2);
    assert_eq!(pats.len(), 5);
    let trials = 100_000u64;
    let counts = mc_pattern_counts(&params, &pats, trials, 3);
    assert_eq!(counts.iter().sum::<u64>(), trials);
    for (pat, &k) in pats.iter().zip(&counts) {
        let p = pattern_probability(&params, pat).to_f64().unwrap();
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((k as f64 / trials as f64 - p).abs() <= 4.0 * sigma, "{pat:?}");
    }
}

#[test]
fn samples_are_deterministic() {
    let params = TreeParams::from_f64(&[0.3, 0.3, 0.3]).unwrap();
    for t in 0..50 {
        assert_eq!(sample_tree(&params, 8, t), sample_tree(&params, 8, t));
    }
}

fn tree_params(z: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..=100, z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn inclusion_is_monotone_in_each_tau(t in tree_params(3), y in 0usize..3, bump in 1u32..50, pick in 0usize..30) {
        let base: Vec<BigRational> = t.iter().map(|&x| q(x as i64, 100)).collect();
        let mut raised = base.clone();
        raised[y] = (&raised[y] + q(bump as i64, 100)).min(BigRational::one());
        let (a, b) = (TreeParams::new(base).unwrap(), TreeParams::new(raised).unwrap());
        let sets = antichains(3, 3, false);
        let set = &sets[pick % sets.len()];
        prop_assert!(exact_inclusion(&a, set).unwrap() <= exact_inclusion(&b, set).unwrap());
    }

    #[test]
    fn sampled_patterns_satisfy_pattern_invariant(t in tree_params(4), trial: u64) {
        let params = TreeParams::new(t.iter().map(|&x| q(x as i64, 100)).collect()).unwrap();
        let s = sample_tree(&params, 1, trial);
        prop_assert!(s.pattern.is_valid());
        prop_assert!(pattern_probability(&params, &s.pattern) > BigRational::from_integer(0.into()));
    }

    #[test]
    fn node_weight_is_additive(pick in 0usize..200) {
        let sets = antichains(5, 3, false);
        let set = &sets[pick % sets.len()];
        let singles: u64 = set.nodes().iter().map(|&v| node_weight(&NodeSet::new(5, [v]).unwrap())).sum();
        prop_assert_eq!(node_weight(set), singles);
        prop_assert!(node_weight(set) <= 16);
    }

    #[test]
    fn superset_is_never_more_likely(t in tree_params(3), pick in 0usize..30) {
        let params = TreeParams::new(t.iter().map(|&x| q(x as i64, 100)).collect()).unwrap();
        let sets = antichains(3, 3, true);
        let set = &sets[pick % sets.len()];
        let first = NodeSet::new(3, [set.nodes()[0]]).unwrap();
        prop_assert!(exact_inclusion(&params, set).unwrap() <= exact_inclusion(&params, &first).unwrap());
    }
}

#[test]
fn root_failure_covers_all_leaves() {
    let params = TreeParams::new(vec![q(1, 1), q(1, 2), q(1, 2)]).unwrap();
    let all = NodeSet::new(3, (0..4).map(|p| Node::new(2, p))).unwrap();
    assert_eq!(exact_inclusion(&params, &all).unwrap(), BigRational::one());
}
