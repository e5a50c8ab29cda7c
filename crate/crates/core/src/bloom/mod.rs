//! Existence filters: a standard Bloom filter and two learned variants
//! that put a key classifier in front of (or underneath) a Bloom filter.

mod classifier;
mod corpus;
mod learned;

pub use classifier::{
    classifier_gradient_check, ClassifierConfig, IntNetClassifier, KeyClassifier, NgramLogistic, DEFAULT_BUCKETS,
};
pub use corpus::synthetic_url_corpus;
pub use learned::{LearnedBloom, ModelHashBloom};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hash::fmix64;

/// Keys that can be hashed into a filter.
pub trait FilterKey {
    fn filter_hash(&self, seed: u64) -> u64;
}

impl FilterKey for u64 {
    #[inline]
    fn filter_hash(&self, seed: u64) -> u64 {
        fmix64(self ^ fmix64(seed))
    }
}

impl FilterKey for [u8] {
    fn filter_hash(&self, seed: u64) -> u64 {
        let mut h = fmix64(seed ^ (self.len() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        for chunk in self.chunks(8) {
            let mut w = [0u8; 8];
            w[..chunk.len()].copy_from_slice(chunk);
            h = fmix64(h ^ u64::from_le_bytes(w)).wrapping_add(0x2545_f491_4f6c_dd1d);
        }
        fmix64(h)
    }
}

impl FilterKey for Vec<u8> {
    #[inline]
    fn filter_hash(&self, seed: u64) -> u64 {
        self.as_slice().filter_hash(seed)
    }
}

/// Anything answering approximate membership queries.
pub trait ExistenceFilter<K: ?Sized> {
    fn contains(&self, key: &K) -> bool;
    /// Everything needed to answer queries, models included.
    fn size_bytes(&self) -> usize;
    fn kind(&self) -> &'static str;
}

/// Bit count and hash count for `n` keys at false-positive rate `p`:
/// `m = ⌈−n ln p / (ln 2)²⌉`, `k = max(1, round(m/n · ln 2))`.
pub fn bloom_params(n: usize, p: f64) -> Result<(u64, u32)> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot size a filter for zero keys".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("false-positive rate must be in (0, 1), got {p}")));
    }
    let ln2 = std::f64::consts::LN_2;
    let m = (-(n as f64) * p.ln() / (ln2 * ln2)).ceil().max(1.0);
    let k = ((m / n as f64) * ln2).round().max(1.0);
    Ok((m as u64, k as u32))
}

/// Bytes for an `m`-bit array.
pub fn bits_to_bytes(m: u64) -> usize {
    m.div_ceil(8) as usize
}

#[derive(Debug, Clone)]
pub struct StandardBloom {
    words: Vec<u64>,
    m: u64,
    k: u32,
    seed: u64,
}

impl StandardBloom {
    pub fn new(m: u64, k: u32, seed: u64) -> Self {
        assert!(m >= 1 && k >= 1, "m and k must be at least 1");
        Self {
            words: vec![0; m.div_ceil(64) as usize],
            m,
            k,
            seed,
        }
    }

    /// Sized by [`bloom_params`].
    pub fn with_rate(n: usize, p: f64, seed: u64) -> Result<Self> {
        let (m, k) = bloom_params(n, p)?;
        Ok(Self::new(m, k, seed))
    }

    pub fn bits(&self) -> u64 {
        self.m
    }

    pub fn hashes(&self) -> u32 {
        self.k
    }

    #[inline]
    fn probes<K: FilterKey + ?Sized>(&self, key: &K) -> impl Iterator<Item = u64> + '_ {
        let h1 = key.filter_hash(self.seed);
        let h2 = key.filter_hash(self.seed ^ 0x5bd1_e995_1234_5678) | 1;
        let m = self.m;
        (0..self.k as u64).map(move |i| h1.wrapping_add(i.wrapping_mul(h2)) % m)
    }

    pub fn insert<K: FilterKey + ?Sized>(&mut self, key: &K) {
        let idx: Vec<u64> = self.probes(key).collect();
        for b in idx {
            self.words[(b / 64) as usize] |= 1 << (b % 64);
        }
    }

    pub fn contains<K: FilterKey + ?Sized>(&self, key: &K) -> bool {
        self.probes(key).all(|b| self.words[(b / 64) as usize] & (1 << (b % 64)) != 0)
    }

    pub fn size_bytes(&self) -> usize {
        bits_to_bytes(self.m)
    }
}

impl<K: FilterKey + ?Sized> ExistenceFilter<K> for StandardBloom {
    fn contains(&self, key: &K) -> bool {
        StandardBloom::contains(self, key)
    }

    fn size_bytes(&self) -> usize {
        StandardBloom::size_bytes(self)
    }

    fn kind(&self) -> &'static str {
        "standard"
    }
}

/// Keys plus non-keys split into train, validation and test sets.
#[derive(Debug, Clone)]
pub struct QuerySets<K> {
    pub keys: Vec<K>,
    pub train: Vec<K>,
    pub validation: Vec<K>,
    pub test: Vec<K>,
}

impl<K> QuerySets<K> {
    /// Shuffles `non_keys` and splits off `train_frac` and `validation_frac`
    /// of them; the rest is the test set.
    pub fn split(keys: Vec<K>, mut non_keys: Vec<K>, train_frac: f64, validation_frac: f64, seed: u64) -> Result<Self> {
        if !(train_frac >= 0.0 && validation_frac >= 0.0 && train_frac + validation_frac <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "bad split fractions {train_frac} / {validation_frac}"
            )));
        }
        non_keys.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n = non_keys.len();
        let a = (n as f64 * train_frac).round() as usize;
        let b = (a + (n as f64 * validation_frac).round() as usize).min(n);
        let test = non_keys.split_off(b);
        let validation = non_keys.split_off(a);
        Ok(Self {
            keys,
            train: non_keys,
            validation,
            test,
        })
    }
}

/// Measured false-positive and false-negative rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterMeasurement {
    pub fpr: f64,
    pub fnr: f64,
    pub false_negatives: usize,
    pub size_bytes: usize,
}

pub fn measure_fpr_fnr<K, F: ExistenceFilter<K> + ?Sized>(filter: &F, keys: &[K], non_keys: &[K]) -> FilterMeasurement {
    let false_negatives = keys.iter().filter(|k| !filter.contains(k)).count();
    let false_positives = non_keys.iter().filter(|k| filter.contains(k)).count();
    FilterMeasurement {
        fpr: false_positives as f64 / non_keys.len().max(1) as f64,
        fnr: false_negatives as f64 / keys.len().max(1) as f64,
        false_negatives,
        size_bytes: filter.size_bytes(),
    }
}

/// Smallest threshold among 0, the midpoints of consecutive distinct
/// validation scores, and a value above the largest score, such that the
/// fraction of scores `>= τ` is at most `target`.
pub fn tune_tau(scores: &[f64], target: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN classifier score".into()));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    if 1.0 <= target {
        return Ok(0.0);
    }
    // scores at index i.. are >= sorted[i]
    for i in 1..sorted.len() {
        if sorted[i] > sorted[i - 1] && (sorted.len() - i) as f64 / n <= target {
            return Ok(0.5 * (sorted[i - 1] + sorted[i]));
        }
    }
    let max = sorted[sorted.len() - 1];
    Ok(if max < 1.0 { 0.5 * (max + 1.0) } else { max.next_up() })
}

/// Area under the ROC curve; ties count one half.
pub fn auc(positive: &[f64], negative: &[f64]) -> f64 {
    if positive.is_empty() || negative.is_empty() {
        return 0.5;
    }
    let mut neg = negative.to_vec();
    neg.sort_by(f64::total_cmp);
    let mut wins = 0.0;
    for &p in positive {
        let below = neg.partition_point(|&x| x < p);
        let not_above = neg.partition_point(|&x| x <= p);
        wins += below as f64 + 0.5 * (not_above - below) as f64;
    }
    wins / (positive.len() as f64 * neg.len() as f64)
}

/// One binomial standard deviation of a rate `p` measured on `n` trials.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n.max(1) as f64).sqrt()
}
