//! Acceptance suite: one PASS/FAIL line per criterion. Every tolerance is a
//! named constant below. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use learned_index::baselines::{BTreeIndex, FixedInterpBTree, LookupTable3};
use learned_index::bloom::{
    binomial_sigma, bloom_params, bits_to_bytes, classifier_gradient_check, measure_fpr_fnr, synthetic_url_corpus,
    ClassifierConfig, IntNetClassifier, KeyClassifier, ModelHashBloom, NgramLogistic, QuerySets,
};
use learned_index::datasets::{gen_dense, gen_lognormal, Dataset};
use learned_index::hash::{count_conflicts, LearnedHashFn, RandomHashFn};
use learned_index::models::{gradient_check, FeedForwardNet, LinearModel, NetArch, Normalization};
use learned_index::rmi::{Leaf, RmiConfig, RmiIndex};
use learned_index::search::{reference_upper_bound, Strategy};
use learned_index::CdfModel;
use learned_index_bench::bloom::{bench_bloom, BloomOptions};
use learned_index_bench::hash::bench_hash;
use learned_index_bench::range::{bench_range, RangeOptions};
use learned_index_bench::scaling::{scaling_check, DEFAULT_PROBES, DEFAULT_REPLICATES, DEFAULT_SIZES};

const C1_TIME_LIMIT: Duration = Duration::from_secs(10);
const C3_THRESHOLD: u32 = 64;
const C4_MIN_REDUCTION: f64 = 0.30;
const C4_RANDOM_TOLERANCE: f64 = 0.01;
const C4_MC_TRIALS: usize = 20;
const C5_RELATIVE: f64 = 0.02;
const SIGMAS: f64 = 3.0;
const C8_SLOPE: (f64, f64) = (0.4, 0.6);
const C8_VARIANCE_RELATIVE: f64 = 0.20;
const C8_TIME_LIMIT: Duration = Duration::from_secs(60);
const C9_MAX_DEVIATION: f64 = 1e-4;

const MB: f64 = 1e6;
const GB: f64 = 1e9;
const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c1_containment() -> Outcome {
    let t = Instant::now();
    let ds = gen_lognormal(100_000, 0.0, 2.0, 1_000_000_000, SEED).unwrap();
    let idx = RmiIndex::build(&ds, RmiConfig::linear(vec![1, 5_000])).unwrap();
    let mut outside = 0usize;
    for (i, k) in ds.keys().iter().enumerate() {
        let est = idx.predict_position(k);
        let Leaf::Model { min_err, max_err, .. } = &idx.leaves()[est.leaf] else {
            unreachable!("no hybrid threshold set")
        };
        let err = i as i64 - est.pos as i64;
        if err < i64::from(*min_err) || err > i64::from(*max_err) {
            outside += 1;
        }
    }
    let elapsed = t.elapsed();
    outcome(
        outside == 0 && elapsed < C1_TIME_LIMIT,
        format!("{} of {} keys outside their window, {elapsed:.2?}", outside, ds.len()),
    )
}

fn c2_oracle_equivalence() -> Outcome {
    let ds = gen_lognormal(1_000_000, 0.0, 2.0, 1_000_000_000, SEED).unwrap();
    let keys = ds.shared_keys();
    let rmi = RmiIndex::build_from_keys(keys.clone(), RmiConfig::linear(vec![1, 10_000])).unwrap();
    let btree = BTreeIndex::build(keys.clone(), 128).unwrap();
    let table = LookupTable3::build(keys.clone()).unwrap();
    let interp = FixedInterpBTree::build(keys.clone(), 7_500).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = 0usize;
    let mut absent = 0usize;
    for _ in 0..100_000 {
        let q = if rng.random_bool(0.5) {
            keys[rng.random_range(0..keys.len())]
        } else {
            absent += 1;
            loop {
                let k = rng.random_range(0..=1_000_000_001u64);
                if keys.binary_search(&k).is_err() {
                    break k;
                }
            }
        };
        let want = reference_upper_bound(&keys, &q);
        let got = Strategy::ALL
            .iter()
            .map(|&s| rmi.lookup(&q, s, &mut ()))
            .chain([btree.upper_bound(&q, &mut ()), table.upper_bound(q, &mut ()), interp.upper_bound(&q, &mut ())]);
        mismatches += got.filter(|&g| g != want).count();
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatches over 100000 lookups ({absent} absent) x 6 structures"),
    )
}

/// Steps of 500 closely spaced keys, far apart: no line fits a leaf that
/// straddles a step.
fn staircase(seed: u64) -> Dataset<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keys = Vec::new();
    for step in 0..20u64 {
        let mut k = step * 50_000_000;
        for _ in 0..500 {
            k += rng.random_range(1..=4);
            keys.push(k);
        }
    }
    Dataset::new(keys).unwrap()
}

fn c3_hybrid() -> Outcome {
    let ds = staircase(SEED);
    let cfg = RmiConfig::linear(vec![1, 16]);
    let plain = RmiIndex::build(&ds, cfg.clone()).unwrap();
    let worst_plain = plain.leaves().iter().filter_map(Leaf::max_abs_err).max().unwrap_or(0);
    let hybrid = RmiIndex::build(&ds, cfg.clone().with_hybrid_threshold(C3_THRESHOLD)).unwrap();
    let worst_model = hybrid.leaves().iter().filter_map(Leaf::max_abs_err).max().unwrap_or(0);
    let full = RmiIndex::build(&ds, cfg.with_hybrid_threshold(0)).unwrap();
    let m = full.leaves().len();
    let pass = hybrid.num_btree_leaves() >= 1 && worst_model <= C3_THRESHOLD && full.num_btree_leaves() == m;
    outcome(
        pass,
        format!(
            "t={C3_THRESHOLD}: {} B-tree leaves, worst model error {worst_model} (unhybridized {worst_plain}); t=0: {}/{m} B-tree leaves",
            hybrid.num_btree_leaves(),
            full.num_btree_leaves()
        ),
    )
}

fn c4_hash() -> Outcome {
    let n = 100_000;
    let dense = gen_dense(n, 0, 1).unwrap();
    let exact = LearnedHashFn::from_model(CdfModel::Linear(LinearModel::new(1.0, 0.0)), n, n);
    let trained = LearnedHashFn::train(dense.shared_keys(), n, None).unwrap();
    let dense_conflicts = count_conflicts(&exact, dense.keys()).colliding_keys
        + count_conflicts(&trained, dense.keys()).colliding_keys;

    let ln = gen_lognormal(n, 0.0, 2.0, 1_000_000_000, SEED).unwrap();
    let report = bench_hash(ln.shared_keys(), &[1.0], SEED).unwrap();
    let reduction = report.conflict_reduction_at_full;

    // Monte-Carlo oracle: n balls into n uniform bins, independent of the
    // hash under test.
    let mut mc = 0.0;
    let mut ours = 0.0;
    for trial in 0..C4_MC_TRIALS {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + trial as u64);
        let mut bins = vec![false; n];
        let mut occupied = 0usize;
        for _ in 0..n {
            let b = rng.random_range(0..n);
            occupied += usize::from(!bins[b]);
            bins[b] = true;
        }
        mc += (n - occupied) as f64 / n as f64;
        let h = RandomHashFn::new(n, trial as u64);
        ours += count_conflicts(&h, ln.keys()).colliding_fraction(n);
    }
    mc /= C4_MC_TRIALS as f64;
    ours /= C4_MC_TRIALS as f64;
    let pass = dense_conflicts == 0 && reduction > C4_MIN_REDUCTION && (ours - mc).abs() <= C4_RANDOM_TOLERANCE;
    outcome(
        pass,
        format!(
            "dense conflicts {dense_conflicts}; lognormal reduction {:.1}% (> {:.0}%); random fraction {ours:.4} vs simulated {mc:.4}",
            100.0 * reduction,
            100.0 * C4_MIN_REDUCTION
        ),
    )
}

fn bloom_bytes(n: f64, p: f64) -> f64 {
    bits_to_bytes(bloom_params(n as usize, p).unwrap().0) as f64
}

fn within(got: f64, want: f64) -> bool {
    (got - want).abs() / want <= C5_RELATIVE
}

fn c5a_bloom_desk() -> Outcome {
    let b = bloom_bytes(1.7e6, 0.01);
    outcome(within(b, 2.04 * MB), format!("(1.7e6, 1%) -> {:.4} MB, expected 2.04 MB", b / MB))
}

fn c5b_bloom_billion() -> Outcome {
    let a = bloom_bytes(1e9, 0.01);
    let b = bloom_bytes(1e9, 1e-4);
    outcome(
        within(a, 1.76 * GB) && within(b, 2.23 * GB),
        format!(
            "(1e9, 1%) -> {:.3} GB, expected 1.76; (1e9, 0.01%) -> {:.3} GB ({:.3} GiB), expected 2.23",
            a / GB,
            b / GB,
            b / f64::from(1u32 << 30)
        ),
    )
}

fn corpus() -> QuerySets<Vec<u8>> {
    let (keys, non_keys) = synthetic_url_corpus(50_000, 200_000, SEED).unwrap();
    QuerySets::split(keys, non_keys, 0.5, 0.25, SEED).unwrap()
}

fn c6_learned_bloom() -> Outcome {
    let (keys, non_keys) = synthetic_url_corpus(50_000, 200_000, SEED).unwrap();
    let opts = BloomOptions {
        seed: SEED,
        ..BloomOptions::default()
    };
    let report = bench_bloom(keys, non_keys, &opts).unwrap();
    let mut pass = true;
    let mut smaller = 0;
    let mut parts = Vec::new();
    for &p in &opts.p_stars {
        let row = |kind: &str| report.rows.iter().find(|r| r.filter_kind == kind && r.p_star == p).unwrap();
        let (l, s) = (row("learned"), row("standard-matched"));
        let bound = p + SIGMAS * binomial_sigma(p, report.test_non_keys);
        pass &= l.fnr == 0.0 && l.fpr_test <= bound;
        smaller += usize::from(l.size_bytes < s.size_bytes);
        parts.push(format!(
            "p*={p}: fnr {} fpr {:.5} <= {bound:.5}, {} B vs standard {} B",
            l.fnr, l.fpr_test, l.size_bytes, s.size_bytes
        ));
    }
    outcome(pass && smaller >= 1, parts.join("; "))
}

fn c7_model_hash() -> Outcome {
    let sets = corpus();
    let cfg = ClassifierConfig {
        seed: SEED,
        ..ClassifierConfig::default()
    };
    let clf = NgramLogistic::train(&sets.keys, &sets.train, &cfg).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    // small bitmaps so that the auxiliary filter is actually needed
    for (bits, p) in [(1_000u64, 0.01), (2_000, 0.005), (5_000, 0.001)] {
        let f = ModelHashBloom::build(clf.clone(), &sets.keys, &sets.validation, bits, p, SEED).unwrap();
        let m = measure_fpr_fnr(&f, &sets.keys, &sets.test);
        let expected = f.fpr_m() * f.fpr_b().unwrap_or(1.0);
        let sigma = binomial_sigma(expected, sets.test.len());
        let ok = m.false_negatives == 0 && !f.aux_skipped() && (m.fpr - expected).abs() <= SIGMAS * sigma;
        pass &= ok;
        parts.push(format!(
            "m={bits}: measured {:.5} vs {:.4}x{:.4}={expected:.5} (3 sigma {:.5})",
            m.fpr,
            f.fpr_m(),
            f.fpr_b().unwrap_or(1.0),
            SIGMAS * sigma
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c8_scaling() -> Outcome {
    let t = Instant::now();
    let r = scaling_check(&DEFAULT_SIZES, 20, DEFAULT_PROBES, DEFAULT_REPLICATES, SEED);
    let elapsed = t.elapsed();
    let v = &r.variance;
    let pass = (C8_SLOPE.0..=C8_SLOPE.1).contains(&r.slope)
        && v.relative_deviation <= C8_VARIANCE_RELATIVE
        && elapsed < C8_TIME_LIMIT;
    outcome(
        pass,
        format!(
            "slope {:.3}; variance {:.3e} vs {:.3e} ({:.1}% off); {elapsed:.2?}",
            r.slope,
            v.empirical,
            v.expected,
            100.0 * v.relative_deviation
        ),
    )
}

fn c9_gradients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for (trial, hidden) in [vec![], vec![4], vec![16], vec![32, 32], vec![8, 3]].into_iter().enumerate() {
        for dim in [1, 3] {
            let arch = NetArch::new(dim, hidden.clone()).unwrap();
            let xs: Vec<f64> = (0..12 * dim).map(|_| rng.random_range(-50.0..500.0)).collect();
            let ys: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..1000.0)).collect();
            let net = FeedForwardNet::random(&arch, None, trial as u64).with_normalization(Normalization::fit(&xs, dim, &ys));
            worst = worst.max(gradient_check(&net, &xs, &ys, 1e-5));
        }
    }
    let labels: Vec<bool> = (0..24).map(|_| rng.random_bool(0.4)).collect();
    let strings: Vec<Vec<u8>> = (0..24)
        .map(|_| (0..rng.random_range(1..16)).map(|_| rng.random_range(b'a'..=b'z')).collect())
        .collect();
    let mut ngram = NgramLogistic::zeros(64);
    let p: Vec<f64> = (0..ngram.params().len()).map(|_| rng.random_range(-2.0..2.0)).collect();
    ngram.set_params(&p);
    worst = worst.max(classifier_gradient_check(&ngram, &strings, &labels, 1e-5));
    let ints: Vec<u64> = (0..24).map(|_| rng.random_range(0..1_000_000)).collect();
    for seed in 0..4 {
        let net = IntNetClassifier::random(16, 0, 1_000_000, seed).unwrap();
        worst = worst.max(classifier_gradient_check(&net, &ints, &labels, 1e-5));
    }
    outcome(worst < C9_MAX_DEVIATION, format!("max relative deviation {worst:.2e}"))
}

fn c10_reported_not_asserted() -> Outcome {
    let ds = gen_lognormal(1_000_000, 0.0, 2.0, 1_000_000_000, SEED).unwrap();
    let mut opts = RangeOptions::for_keys(ds.len());
    opts.seed = SEED;
    let range = bench_range(ds.shared_keys(), &opts).unwrap();
    let reference = range.rows.iter().find(|r| r.structure == "btree" && r.config == "page=128").unwrap();
    let best_rmi = range
        .rows
        .iter()
        .filter(|r| r.structure == "rmi")
        .min_by(|a, b| a.avg_lookup_ns.total_cmp(&b.avg_lookup_ns))
        .unwrap();
    let hash = bench_hash(
        gen_lognormal(100_000, 0.0, 2.0, 1_000_000_000, SEED).unwrap().shared_keys(),
        &[1.0],
        SEED,
    )
    .unwrap();
    // the structural facts hold; the absolute figures are only printed
    let pass = reference.speedup_vs_reference == 1.0 && reference.size_factor_vs_reference == 1.0 && !range.timing_is_deterministic;
    outcome(
        pass,
        format!(
            "B-tree page=128 {:.0} ns, best RMI [{}] {:.0} ns ({:.2}x, {:.2}x size); hash conflict reduction {:.1}% (not compared with 300 ns or 77%)",
            reference.avg_lookup_ns,
            best_rmi.config,
            best_rmi.avg_lookup_ns,
            best_rmi.speedup_vs_reference,
            best_rmi.size_factor_vs_reference,
            100.0 * hash.conflict_reduction_at_full
        ),
    )
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 11] = [
        ("1", "error-bound containment", c1_containment),
        ("2", "oracle equivalence", c2_oracle_equivalence),
        ("3", "hybrid guarantee", c3_hybrid),
        ("4", "perfect-CDF and learned hash", c4_hash),
        ("5a", "Bloom sizing at 1.7M keys", c5a_bloom_desk),
        ("5b", "Bloom sizing at 1B keys", c5b_bloom_billion),
        ("6", "learned Bloom correctness", c6_learned_bloom),
        ("7", "model-hash composition", c7_model_hash),
        ("8", "sqrt(N) scaling", c8_scaling),
        ("9", "gradient checks", c9_gradients),
        ("10", "hardware-bound figures reported only", c10_reported_not_asserted),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let o = run();
        println!("[{}] criterion {id:<3} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
