use serde::Serialize;

use learned_index::bloom::{
    bits_to_bytes, bloom_params, measure_fpr_fnr, ClassifierConfig, ExistenceFilter, FilterKey, FilterMeasurement,
    IntNetClassifier, KeyClassifier, LearnedBloom, ModelHashBloom, NgramLogistic, QuerySets, StandardBloom,
};

use crate::BenchError;

pub const DEFAULT_P_STARS: [f64; 3] = [0.001, 0.005, 0.01];
pub const TRAIN_FRACTION: f64 = 0.5;
pub const VALIDATION_FRACTION: f64 = 0.25;

/// Key types with a default classifier.
pub trait BloomKey: FilterKey + Clone + std::fmt::Debug {
    type Classifier: KeyClassifier<Self> + Clone;

    fn train_classifier(keys: &[Self], non_keys: &[Self], cfg: &ClassifierConfig) -> Result<Self::Classifier, BenchError>;
}

impl BloomKey for Vec<u8> {
    type Classifier = NgramLogistic;

    fn train_classifier(keys: &[Self], non_keys: &[Self], cfg: &ClassifierConfig) -> Result<NgramLogistic, BenchError> {
        Ok(NgramLogistic::train(keys, non_keys, cfg)?)
    }
}

impl BloomKey for u64 {
    type Classifier = IntNetClassifier;

    fn train_classifier(keys: &[Self], non_keys: &[Self], cfg: &ClassifierConfig) -> Result<IntNetClassifier, BenchError> {
        Ok(IntNetClassifier::train(keys, non_keys, cfg)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BloomRow {
    pub filter_kind: String,
    pub p_star: f64,
    pub size_bytes: usize,
    pub fpr_test: f64,
    pub fnr: f64,
    /// Learned: `τ`. Model-hash: `FPR_m` on validation.
    pub model_stat: f64,
    /// Model-hash only: whether the auxiliary filter was skipped.
    pub aux_skipped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BloomReport {
    pub keys: usize,
    pub train_non_keys: usize,
    pub validation_non_keys: usize,
    pub test_non_keys: usize,
    pub classifier_bytes: usize,
    pub bitmap_bits: u64,
    pub rows: Vec<BloomRow>,
}

#[derive(Debug, Clone)]
pub struct BloomOptions {
    pub p_stars: Vec<f64>,
    /// Bits of the model-hash bitmap; `None` uses one bit per key.
    pub bitmap_bits: Option<u64>,
    pub seed: u64,
    pub classifier: ClassifierConfig,
}

impl Default for BloomOptions {
    fn default() -> Self {
        Self {
            p_stars: DEFAULT_P_STARS.to_vec(),
            bitmap_bits: None,
            seed: 0,
            classifier: ClassifierConfig::default(),
        }
    }
}

fn checked<K, F: ExistenceFilter<K>>(f: &F, sets: &QuerySets<K>) -> Result<FilterMeasurement, BenchError> {
    let m = measure_fpr_fnr(f, &sets.keys, &sets.test);
    if m.false_negatives > 0 {
        return Err(BenchError::Correctness(format!("{} filter lost {} keys", f.kind(), m.false_negatives)));
    }
    Ok(m)
}

/// Standard, learned and model-hash filters per target rate, plus a standard
/// filter sized to the learned filter's measured test rate.
pub fn bench_bloom<K: BloomKey>(keys: Vec<K>, non_keys: Vec<K>, opts: &BloomOptions) -> Result<BloomReport, BenchError> {
    let sets = QuerySets::split(keys, non_keys, TRAIN_FRACTION, VALIDATION_FRACTION, opts.seed)?;
    let cfg = ClassifierConfig {
        seed: opts.seed,
        ..opts.classifier.clone()
    };
    let clf = K::train_classifier(&sets.keys, &sets.train, &cfg)?;
    let bits = opts.bitmap_bits.unwrap_or(sets.keys.len() as u64).max(1);
    let mut rows = Vec::new();
    let row = |kind: &str, p: f64, m: &FilterMeasurement, stat: f64, skipped: bool| BloomRow {
        filter_kind: kind.to_string(),
        p_star: p,
        size_bytes: m.size_bytes,
        fpr_test: m.fpr,
        fnr: m.fnr,
        model_stat: stat,
        aux_skipped: skipped,
    };
    for &p in &opts.p_stars {
        let mut std = StandardBloom::with_rate(sets.keys.len(), p, opts.seed)?;
        sets.keys.iter().for_each(|k| std.insert(k));
        rows.push(row("standard", p, &checked(&std, &sets)?, f64::NAN, false));

        let learned = LearnedBloom::build(clf.clone(), &sets.keys, &sets.validation, p, opts.seed)?;
        let lm = checked(&learned, &sets)?;
        rows.push(row("learned", p, &lm, learned.tau(), false));

        // a zero measured rate is floored at one test query
        let matched_rate = lm.fpr.max(1.0 / sets.test.len().max(1) as f64).min(0.5);
        let (mbits, k) = bloom_params(sets.keys.len(), matched_rate)?;
        let mut matched = StandardBloom::new(mbits, k, opts.seed);
        sets.keys.iter().for_each(|x| matched.insert(x));
        let mm = checked(&matched, &sets)?;
        debug_assert_eq!(mm.size_bytes, bits_to_bytes(mbits));
        rows.push(row("standard-matched", p, &mm, matched_rate, false));

        let mh = ModelHashBloom::build(clf.clone(), &sets.keys, &sets.validation, bits, p, opts.seed)?;
        rows.push(row("model-hash", p, &checked(&mh, &sets)?, mh.fpr_m(), mh.aux_skipped()));
    }
    Ok(BloomReport {
        keys: sets.keys.len(),
        train_non_keys: sets.train.len(),
        validation_non_keys: sets.validation.len(),
        test_non_keys: sets.test.len(),
        classifier_bytes: clf.size_bytes(),
        bitmap_bits: bits,
        rows,
    })
}
