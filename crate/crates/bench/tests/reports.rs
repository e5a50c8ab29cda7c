use std::sync::Arc;

use learned_index::datasets::{gen_dense, gen_lognormal};
use learned_index::rmi::{RmiConfig, RmiIndex};
use learned_index::search::Strategy;
use learned_index_bench::hash::bench_hash;
use learned_index_bench::range::{bench_range, make_queries, RangeOptions};
use learned_index_bench::BenchError;

fn quick(n: usize) -> RangeOptions {
    let mut o = RangeOptions::for_keys(n);
    o.lookups = 5_000;
    o.runs = 1;
    o
}

#[test]
fn dense_rmi_is_far_smaller_than_btree() {
    let keys = gen_dense(200_000, 1_000, 3).unwrap().shared_keys();
    let mut opts = quick(200_000);
    // a linear CDF needs no second stage to speak of
    opts.rmi_leaves = vec![1, 200];
    let r = bench_range(keys, &opts).unwrap();
    let btree = r.rows.iter().find(|r| r.structure == "btree" && r.config == "page=128").unwrap();
    let rmi = r.rows.iter().find(|r| r.structure == "rmi" && r.config == "stages=1x1 linear model-biased-binary").unwrap();
    assert!(rmi.size_bytes * 50 < btree.size_bytes, "{} vs {}", rmi.size_bytes, btree.size_bytes);
    // exact model: one comparison to confirm the predicted slot
    assert!(rmi.comparisons <= 2.0, "{}", rmi.comparisons);
}

#[test]
fn comparisons_match_probe_counters() {
    let ds = gen_lognormal(50_000, 0.0, 2.0, 1_000_000_000, 5).unwrap();
    let keys: Arc<[u64]> = ds.shared_keys();
    let mut opts = quick(keys.len());
    opts.absent_fraction = 0.5;
    opts.rmi_leaves = vec![500];
    opts.strategies = vec![Strategy::BiasedQuaternary];
    let r = bench_range(keys.clone(), &opts).unwrap();
    let idx = RmiIndex::build_from_keys(keys.clone(), RmiConfig::linear(vec![1, 500])).unwrap();
    let mut probes = 0u64;
    for q in make_queries(&keys, opts.lookups, opts.absent_fraction, opts.seed) {
        idx.lookup(&q, Strategy::BiasedQuaternary, &mut probes);
    }
    let row = r.rows.iter().find(|r| r.structure == "rmi").unwrap();
    assert_eq!(row.comparisons, probes as f64 / opts.lookups as f64);
}

#[test]
fn reference_row_has_unit_factors() {
    let keys = gen_lognormal(30_000, 0.0, 2.0, 1_000_000_000, 1).unwrap().shared_keys();
    let mut opts = quick(30_000);
    opts.page_sizes = vec![64];
    let r = bench_range(keys, &opts).unwrap();
    let reference = r.rows.iter().find(|r| r.config == "page=128").unwrap();
    assert_eq!(reference.speedup_vs_reference, 1.0);
    assert_eq!(reference.size_factor_vs_reference, 1.0);
}

#[test]
fn string_keys_get_absent_queries() {
    let keys: Vec<Vec<u8>> = (0..500u32).map(|i| format!("key{i:05}").into_bytes()).collect();
    let qs = make_queries(&keys, 1_000, 1.0, 4);
    assert!(qs.iter().all(|q| keys.binary_search(q).is_err()));
}

#[test]
fn hash_rows_cover_all_maps() {
    let keys = gen_lognormal(20_000, 0.0, 2.0, 1_000_000_000, 2).unwrap().shared_keys();
    let r = bench_hash(keys, &[0.75, 1.0, 1.25], 0).unwrap();
    // learned and random, chained at three utilizations plus in-place at 1.0
    assert_eq!(r.rows.len(), 8);
    assert!(r.rows.iter().filter(|r| r.map == "in-place").all(|r| r.m == r.n && r.empty_bytes == 0));
    assert!(r.conflict_reduction_at_full > 0.0);
}

#[test]
fn error_exit_codes() {
    assert_eq!(BenchError::Correctness("x".into()).exit_code(), 2);
    assert_eq!(BenchError::Io(std::io::Error::other("x")).exit_code(), 1);
}
