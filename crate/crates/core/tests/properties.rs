use std::sync::Arc;

use proptest::prelude::*;

use learned_index::baselines::{BTreeIndex, FixedInterpBTree, LookupTable3, NodeSearch};
use learned_index::bloom::{bloom_params, measure_fpr_fnr, ExistenceFilter, StandardBloom};
use learned_index::datasets::{gen_dense, gen_lognormal, gen_strings, Dataset};
use learned_index::hash::{
    count_conflicts, slot_loads, ChainedHashMap, EmpiricalCdfHash, InPlaceChainedHashMap, RandomHashFn, SlotHash,
};
use learned_index::rmi::{route_index, Leaf, RmiConfig, RmiIndex};
use learned_index::search::{reference_upper_bound, Strategy as Search};

fn sorted_keys(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::btree_set(any::<u64>().prop_map(|k| k >> (k % 48)), 1..max_len)
        .prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generators_are_sorted_unique_and_deterministic(n in 1usize..2000, seed in any::<u64>(), sigma in 0.2f64..3.0) {
        let a = gen_lognormal(n, 0.0, sigma, 1_000_000_000, seed).unwrap();
        prop_assert!(a.keys().windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(a.len(), n);
        prop_assert_eq!(&a, &gen_lognormal(n, 0.0, sigma, 1_000_000_000, seed).unwrap());
        let s = gen_strings(n.min(500), b"xyz", 1, 8, seed).unwrap();
        prop_assert!(s.keys().windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(&s, &gen_strings(n.min(500), b"xyz", 1, 8, seed).unwrap());
    }

    #[test]
    fn dense_is_exactly_linear(n in 1usize..5000, start in 0u64..1 << 40, step in 1u64..1000) {
        let d = gen_dense(n, start, step).unwrap();
        prop_assert!(d.keys().iter().enumerate().all(|(i, &k)| k == start + i as u64 * step));
    }

    #[test]
    fn rmi_bounds_contain_every_key(keys in sorted_keys(3000), leaves in 1usize..64) {
        let idx = RmiIndex::build(&Dataset::new(keys.clone()).unwrap(), RmiConfig::linear(vec![1, leaves])).unwrap();
        for (i, k) in keys.iter().enumerate() {
            let est = idx.predict_position(k);
            prop_assert!(est.lo <= i && i <= est.hi, "{i} outside {}..={}", est.lo, est.hi);
            if let Leaf::Model { min_err, max_err, .. } = &idx.leaves()[est.leaf] {
                let err = i as i64 - est.pos as i64;
                prop_assert!(i64::from(*min_err) <= err && err <= i64::from(*max_err));
            }
        }
    }

    #[test]
    fn routing_is_total(keys in sorted_keys(500), probes in prop::collection::vec(any::<u64>(), 1..200),
                        leaves in 1usize..300, pred in any::<f64>(), m in 1usize..1000, n in 1usize..1_000_000) {
        let idx = RmiIndex::build_from_keys(keys.into(), RmiConfig::linear(vec![1, leaves])).unwrap();
        for q in probes.iter().chain([0, u64::MAX].iter()) {
            prop_assert!(idx.route(q, 1) < leaves);
        }
        prop_assert!(route_index(pred, m, n) < m);
    }

    #[test]
    fn lookups_equal_reference(keys in sorted_keys(3000), probes in prop::collection::vec(any::<u64>(), 1..300),
                               leaves in 1usize..80, threshold in prop::option::of(0u32..40)) {
        let data: Arc<[u64]> = keys.clone().into();
        let mut cfg = RmiConfig::linear(vec![1, leaves]);
        if let Some(t) = threshold {
            cfg = cfg.with_hybrid_threshold(t);
        }
        let idx = RmiIndex::build_from_keys(data.clone(), cfg).unwrap();
        let btree = BTreeIndex::build(data.clone(), 16).unwrap();
        let interp = BTreeIndex::build_range(data.clone(), 0, keys.len(), 8, NodeSearch::Interpolation).unwrap();
        let fixed = FixedInterpBTree::build(data.clone(), 256).unwrap();
        let table = LookupTable3::build(data.clone()).unwrap();
        let present = keys.iter().step_by(keys.len() / 100 + 1);
        for q in probes.iter().chain(present).chain([0, u64::MAX].iter()) {
            let want = reference_upper_bound(&keys, q);
            for s in Search::ALL {
                prop_assert_eq!(idx.lookup(q, s, &mut ()), want, "{:?}", s);
            }
            prop_assert_eq!(btree.upper_bound(q, &mut ()), want);
            prop_assert_eq!(interp.upper_bound(q, &mut ()), want);
            prop_assert_eq!(fixed.upper_bound(q, &mut ()), want);
            prop_assert_eq!(table.upper_bound(*q, &mut ()), want);
        }
    }

    #[test]
    fn hybrid_leaves_respect_threshold(keys in sorted_keys(3000), t in 0u32..32) {
        let idx = RmiIndex::build_from_keys(keys.into(), RmiConfig::linear(vec![1, 32]).with_hybrid_threshold(t)).unwrap();
        for leaf in idx.leaves() {
            if let Some(e) = leaf.max_abs_err() {
                prop_assert!(e <= t);
            }
        }
    }

    #[test]
    fn serialization_is_deterministic(keys in sorted_keys(800), leaves in 1usize..40) {
        let data: Arc<[u64]> = keys.into();
        let a = RmiIndex::build_from_keys(data.clone(), RmiConfig::linear(vec![1, leaves])).unwrap().to_json().unwrap();
        let b = RmiIndex::build_from_keys(data.clone(), RmiConfig::linear(vec![1, leaves])).unwrap().to_json().unwrap();
        prop_assert_eq!(&a, &b);
        let back = RmiIndex::from_json(&a, data).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), a);
    }

    #[test]
    fn btree_page_brackets_every_key(keys in sorted_keys(4000), page in 2usize..300) {
        let t = BTreeIndex::build(keys.clone().into(), page).unwrap();
        for (i, k) in keys.iter().enumerate() {
            let (s, e) = t.find_page(k, &mut ());
            prop_assert!(s <= i && i < e && e - s <= page);
        }
        let bigger = BTreeIndex::build(keys.clone().into(), page * 2).unwrap();
        prop_assert!(bigger.size_bytes() <= t.size_bytes());
    }

    #[test]
    fn maps_return_every_payload(keys in sorted_keys(2000), util in 0.5f64..1.5, seed in any::<u64>()) {
        let payloads: Vec<u64> = keys.iter().map(|k| k ^ 0xabcd).collect();
        let slots = ((keys.len() as f64 * util) as usize).max(1);
        let h = RandomHashFn::new(slots, seed);
        let map = ChainedHashMap::build(&h, &keys, &payloads).unwrap();
        let ip = InPlaceChainedHashMap::build(RandomHashFn::new(keys.len(), seed), &keys, &payloads).unwrap();
        prop_assert_eq!(ip.stats().slots, keys.len());
        for (k, p) in keys.iter().zip(&payloads) {
            prop_assert_eq!(map.get(*k), Some(*p));
            prop_assert_eq!(ip.get(*k), Some(*p));
        }
        prop_assert_eq!(map.get(u64::MAX).is_some(), keys.contains(&u64::MAX));

        // brute-force tally of keys beyond the first in each slot
        let mut by_slot = std::collections::HashMap::<usize, usize>::new();
        for k in &keys {
            *by_slot.entry(h.slot(*k)).or_default() += 1;
        }
        let tally: usize = by_slot.values().map(|&c| c - 1).sum();
        let stats = count_conflicts(&h, &keys);
        prop_assert_eq!(stats.colliding_keys, tally);
        prop_assert_eq!(stats.occupied_slots, by_slot.len());
        prop_assert_eq!(slot_loads(&h, &keys).iter().map(|&l| l as usize).sum::<usize>(), keys.len());
    }

    #[test]
    fn empirical_cdf_hash_is_collision_free(keys in sorted_keys(3000)) {
        let h = EmpiricalCdfHash::new(keys.clone().into(), keys.len());
        prop_assert_eq!(count_conflicts(&h, &keys).colliding_keys, 0);
    }

    #[test]
    fn bloom_has_no_false_negatives(keys in prop::collection::hash_set(any::<u64>(), 1..3000), p in 1e-4f64..0.2) {
        let keys: Vec<u64> = keys.into_iter().collect();
        let mut f = StandardBloom::with_rate(keys.len(), p, 7).unwrap();
        keys.iter().for_each(|k| f.insert(k));
        prop_assert!(keys.iter().all(|k| ExistenceFilter::<u64>::contains(&f, k)));
    }
}

#[test]
fn bloom_sizing_inverts_for_large_n() {
    for (n, p) in [(10_000usize, 0.01), (20_000, 0.05), (50_000, 0.001)] {
        let (m, k) = bloom_params(n, p).unwrap();
        let mut f = StandardBloom::new(m, k, 3);
        (0..n as u64).for_each(|i| f.insert(&(i * 2)));
        let non: Vec<u64> = (0..400_000u64).map(|i| i * 2 + 1).collect();
        let keys: Vec<u64> = (0..n as u64).map(|i| i * 2).collect();
        let r = measure_fpr_fnr(&f, &keys, &non);
        assert_eq!(r.false_negatives, 0);
        assert!((r.fpr - p).abs() / p < 0.2, "n={n} p={p} measured {}", r.fpr);
    }
}
