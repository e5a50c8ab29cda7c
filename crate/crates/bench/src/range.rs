use std::hint::black_box;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use learned_index::baselines::{BTreeIndex, FixedInterpBTree, LookupTable3, PAGE_SIZES, REFERENCE_PAGE_SIZE};
use learned_index::rmi::{RmiConfig, RmiIndex};
use learned_index::search::{reference_upper_bound, Strategy};
use learned_index::IndexKey;

use crate::BenchError;

/// Interpolation B-tree budget per key, from 1.5 MB for 200M keys.
const INTERP_BYTES_PER_KEY: f64 = 1.5e6 / 200e6;
const MIN_INTERP_BUDGET: usize = 1024;

type Counted<K> = Box<dyn Fn(&K, &mut u64) -> usize>;
type Plain<K> = Box<dyn Fn(&K) -> usize>;

/// One structure under test.
pub struct Candidate<K> {
    pub structure: String,
    pub config: String,
    pub size_bytes: usize,
    counted: Counted<K>,
    plain: Plain<K>,
    /// Only the model (or tree descent) part of a lookup.
    model: Option<Plain<K>>,
}

impl<K> Candidate<K> {
    pub fn new(
        structure: impl Into<String>,
        config: impl Into<String>,
        size_bytes: usize,
        counted: Counted<K>,
        plain: Plain<K>,
        model: Option<Plain<K>>,
    ) -> Self {
        Self {
            structure: structure.into(),
            config: config.into(),
            size_bytes,
            counted,
            plain,
            model,
        }
    }
}

/// Keys the range benchmark can run on.
pub trait BenchKey: IndexKey {
    /// A random key that is not in `keys`.
    fn absent(keys: &[Self], rng: &mut ChaCha8Rng) -> Self;

    /// Structures that exist only for this key type.
    fn extra_candidates(_keys: &Arc<[Self]>) -> Result<Vec<Candidate<Self>>, BenchError> {
        Ok(Vec::new())
    }
}

impl BenchKey for u64 {
    fn absent(keys: &[u64], rng: &mut ChaCha8Rng) -> u64 {
        let (lo, hi) = (keys[0], keys[keys.len() - 1]);
        loop {
            let k = rng.random_range(lo.saturating_sub(1)..=hi.saturating_add(1));
            if keys.binary_search(&k).is_err() {
                return k;
            }
        }
    }

    fn extra_candidates(keys: &Arc<[u64]>) -> Result<Vec<Candidate<u64>>, BenchError> {
        let t = Arc::new(LookupTable3::build(keys.clone())?);
        let (a, b) = (t.clone(), t.clone());
        Ok(vec![Candidate::new(
            "lookup-table",
            "3-stage/64",
            t.size_bytes(),
            Box::new(move |k, c| a.upper_bound(*k, c)),
            Box::new(move |k| b.upper_bound(*k, &mut ())),
            None,
        )])
    }
}

impl BenchKey for Vec<u8> {
    fn absent(keys: &[Vec<u8>], rng: &mut ChaCha8Rng) -> Vec<u8> {
        loop {
            let mut k = keys[rng.random_range(0..keys.len())].clone();
            k.push(rng.random());
            if keys.binary_search(&k).is_err() {
                return k;
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeOptions {
    pub lookups: usize,
    /// Timed runs after the discarded warm-up run.
    pub runs: usize,
    pub absent_fraction: f64,
    pub seed: u64,
    pub rmi_leaves: Vec<usize>,
    pub page_sizes: Vec<usize>,
    pub strategies: Vec<Strategy>,
}

impl RangeOptions {
    pub fn for_keys(n: usize) -> Self {
        Self {
            lookups: 100_000,
            runs: 5,
            absent_fraction: 0.0,
            seed: 0,
            rmi_leaves: default_rmi_leaves(n),
            page_sizes: PAGE_SIZES.to_vec(),
            strategies: Strategy::ALL.to_vec(),
        }
    }
}

/// Second-stage sizes proportional to 10k..200k leaves over 200M keys,
/// i.e. {1k, 5k, 10k, 20k} at 1M keys.
pub fn default_rmi_leaves(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [1000, 200, 100, 50].iter().map(|d| (n / d).max(1)).collect();
    v.dedup();
    v
}

/// `count` lookups drawn uniformly from `keys`, with `absent_fraction` of
/// them replaced by keys not present.
pub fn make_queries<K: BenchKey>(keys: &[K], count: usize, absent_fraction: f64, seed: u64) -> Vec<K> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            if rng.random_bool(absent_fraction.clamp(0.0, 1.0)) {
                K::absent(keys, &mut rng)
            } else {
                keys[rng.random_range(0..keys.len())].clone()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeRow {
    pub structure: String,
    pub config: String,
    pub size_bytes: usize,
    pub avg_lookup_ns: f64,
    pub model_ns: f64,
    pub model_ns_pct: f64,
    pub comparisons: f64,
    pub speedup_vs_reference: f64,
    pub size_factor_vs_reference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeReport {
    pub n: usize,
    pub options: RangeOptions,
    /// Timing columns vary between runs; all others are deterministic.
    pub timing_is_deterministic: bool,
    pub rows: Vec<RangeRow>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Median ns per call over `runs` timed passes, after one discarded pass.
pub fn time_per_lookup<K>(f: &dyn Fn(&K) -> usize, queries: &[K], runs: usize) -> f64 {
    let mut samples = Vec::with_capacity(runs);
    for run in 0..=runs.max(1) {
        let t = Instant::now();
        for q in queries {
            black_box(f(black_box(q)));
        }
        if run > 0 {
            samples.push(t.elapsed().as_nanos() as f64 / queries.len().max(1) as f64);
        }
    }
    median(samples)
}

/// All structures compared by the range benchmark.
pub fn candidates<K: BenchKey>(keys: &Arc<[K]>, opts: &RangeOptions) -> Result<Vec<Candidate<K>>, BenchError> {
    let mut out = Vec::new();
    let mut pages = opts.page_sizes.clone();
    if !pages.contains(&REFERENCE_PAGE_SIZE) {
        pages.push(REFERENCE_PAGE_SIZE);
    }
    for ps in pages {
        let t = Arc::new(BTreeIndex::build(keys.clone(), ps)?);
        let (a, b, m) = (t.clone(), t.clone(), t.clone());
        out.push(Candidate::new(
            "btree",
            format!("page={ps}"),
            t.size_bytes(),
            Box::new(move |k, c| a.upper_bound(k, c)),
            Box::new(move |k| b.upper_bound(k, &mut ())),
            Some(Box::new(move |k| m.find_page(k, &mut ()).0)),
        ));
    }
    for &leaves in &opts.rmi_leaves {
        let idx = Arc::new(RmiIndex::build_from_keys(keys.clone(), RmiConfig::linear(vec![1, leaves]))?);
        for &s in &opts.strategies {
            let (a, b, m) = (idx.clone(), idx.clone(), idx.clone());
            let extra = if s == Strategy::BiasedQuaternary { idx.quaternary_aux_bytes() } else { 0 };
            out.push(Candidate::new(
                "rmi",
                format!("stages=1x{leaves} linear {}", s.name()),
                idx.index_size_bytes() + extra,
                Box::new(move |k, c| a.lookup(k, s, c)),
                Box::new(move |k| b.lookup(k, s, &mut ())),
                Some(Box::new(move |k| m.predict_position(k).pos)),
            ));
        }
    }
    let budget = ((keys.len() as f64 * INTERP_BYTES_PER_KEY) as usize).max(MIN_INTERP_BUDGET);
    let it = Arc::new(FixedInterpBTree::build(keys.clone(), budget)?);
    let (a, b, m) = (it.clone(), it.clone(), it.clone());
    out.push(Candidate::new(
        "interp-btree",
        format!("budget={budget} page={} height={}", it.page_size(), it.height()),
        it.size_bytes(),
        Box::new(move |k, c| a.upper_bound(k, c)),
        Box::new(move |k| b.upper_bound(k, &mut ())),
        Some(Box::new(move |k| m.tree().find_page(k, &mut ()).0)),
    ));
    out.extend(K::extra_candidates(keys)?);
    let (a, b) = (keys.clone(), keys.clone());
    out.push(Candidate::new(
        "binary-search",
        "full array",
        0,
        Box::new(move |k, c| {
            let (mut lo, mut hi) = (0, a.len());
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                *c += 1;
                if a[mid] < *k {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            lo
        }),
        Box::new(move |k| reference_upper_bound(&b, k)),
        None,
    ));
    Ok(out)
}

/// Verifies every candidate on every query, then times it.
pub fn bench_range<K: BenchKey>(keys: Arc<[K]>, opts: &RangeOptions) -> Result<RangeReport, BenchError> {
    let queries = make_queries(&keys, opts.lookups, opts.absent_fraction, opts.seed);
    let expected: Vec<usize> = queries.iter().map(|q| reference_upper_bound(&keys, q)).collect();
    let mut rows = Vec::new();
    for c in candidates(&keys, opts)? {
        let mut probes = 0u64;
        for (q, &want) in queries.iter().zip(&expected) {
            let got = (c.counted)(q, &mut probes);
            if got != want || (c.plain)(q) != want {
                return Err(BenchError::Correctness(format!(
                    "{} [{}] returned {got} for {q:?}, expected {want}",
                    c.structure, c.config
                )));
            }
        }
        let avg_lookup_ns = time_per_lookup(&*c.plain, &queries, opts.runs);
        let model_ns = c.model.as_ref().map_or(0.0, |m| time_per_lookup(&**m, &queries, opts.runs));
        rows.push(RangeRow {
            structure: c.structure,
            config: c.config,
            size_bytes: c.size_bytes,
            avg_lookup_ns,
            model_ns,
            model_ns_pct: if avg_lookup_ns > 0.0 { 100.0 * model_ns / avg_lookup_ns } else { 0.0 },
            comparisons: probes as f64 / queries.len().max(1) as f64,
            speedup_vs_reference: 0.0,
            size_factor_vs_reference: 0.0,
        });
    }
    let reference = format!("page={REFERENCE_PAGE_SIZE}");
    let r = rows
        .iter()
        .find(|r| r.structure == "btree" && r.config == reference)
        .map(|r| (r.avg_lookup_ns, r.size_bytes as f64))
        .expect("reference row is always built");
    for row in &mut rows {
        row.speedup_vs_reference = r.0 / row.avg_lookup_ns;
        row.size_factor_vs_reference = row.size_bytes as f64 / r.1;
    }
    Ok(RangeReport {
        n: keys.len(),
        options: opts.clone(),
        timing_is_deterministic: false,
        rows,
    })
}
