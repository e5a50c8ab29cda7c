use std::marker::PhantomData;

use super::{bits_to_bytes, tune_tau, ExistenceFilter, FilterKey, KeyClassifier, StandardBloom};
use crate::error::{Error, Result};

/// Classifier with threshold `τ`, backed by an overflow Bloom filter over the
/// keys the classifier rejects. Never yields a false negative on its keys.
#[derive(Debug, Clone)]
pub struct LearnedBloom<K, C> {
    classifier: C,
    tau: f64,
    overflow: Option<StandardBloom>,
    overflow_keys: usize,
    _key: PhantomData<fn(&K)>,
}

impl<K: FilterKey, C: KeyClassifier<K>> LearnedBloom<K, C> {
    /// Tunes `τ` on `validation` non-keys to a rate of `p_star / 2` and sizes
    /// the overflow filter for the same rate.
    pub fn build(classifier: C, keys: &[K], validation: &[K], p_star: f64, seed: u64) -> Result<Self> {
        if !(p_star > 0.0 && p_star < 1.0) {
            return Err(Error::InvalidArgument(format!("target rate must be in (0, 1), got {p_star}")));
        }
        let scores: Vec<f64> = validation.iter().map(|x| classifier.score(x)).collect();
        let tau = tune_tau(&scores, p_star / 2.0)?;
        Self::with_tau(classifier, keys, tau, p_star / 2.0, seed)
    }

    /// Fixed threshold; the overflow filter targets `overflow_rate`.
    pub fn with_tau(classifier: C, keys: &[K], tau: f64, overflow_rate: f64, seed: u64) -> Result<Self> {
        let rejected: Vec<&K> = keys.iter().filter(|k| classifier.score(k) < tau).collect();
        let overflow = if rejected.is_empty() {
            None
        } else {
            let mut f = StandardBloom::with_rate(rejected.len(), overflow_rate, seed)?;
            rejected.iter().for_each(|k| f.insert(*k));
            Some(f)
        };
        Ok(Self {
            classifier,
            tau,
            overflow,
            overflow_keys: rejected.len(),
            _key: PhantomData,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn classifier(&self) -> &C {
        &self.classifier
    }

    /// Keys scoring below `τ`, all stored in the overflow filter.
    pub fn overflow_keys(&self) -> usize {
        self.overflow_keys
    }

    pub fn overflow_bytes(&self) -> usize {
        self.overflow.as_ref().map_or(0, StandardBloom::size_bytes)
    }
}

impl<K: FilterKey, C: KeyClassifier<K>> ExistenceFilter<K> for LearnedBloom<K, C> {
    fn contains(&self, key: &K) -> bool {
        self.classifier.score(key) >= self.tau || self.overflow.as_ref().is_some_and(|f| f.contains(key))
    }

    /// Classifier, threshold and overflow filter.
    fn size_bytes(&self) -> usize {
        self.classifier.size_bytes() + 8 + self.overflow_bytes()
    }

    fn kind(&self) -> &'static str {
        "learned"
    }
}

/// Bitmap indexed by `⌊m · f(x)⌋`, combined by AND with a standard filter
/// over all keys whose rate makes the product hit the target.
#[derive(Debug, Clone)]
pub struct ModelHashBloom<K, C> {
    classifier: C,
    words: Vec<u64>,
    m: u64,
    fpr_m: f64,
    fpr_b: Option<f64>,
    aux: Option<StandardBloom>,
    _key: PhantomData<fn(&K)>,
}

impl<K: FilterKey, C: KeyClassifier<K>> ModelHashBloom<K, C> {
    pub fn build(classifier: C, keys: &[K], validation: &[K], m: u64, p_star: f64, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("bitmap needs at least one bit".into()));
        }
        if !(p_star > 0.0 && p_star < 1.0) {
            return Err(Error::InvalidArgument(format!("target rate must be in (0, 1), got {p_star}")));
        }
        if validation.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut f = Self {
            classifier,
            words: vec![0; m.div_ceil(64) as usize],
            m,
            fpr_m: 0.0,
            fpr_b: None,
            aux: None,
            _key: PhantomData,
        };
        for k in keys {
            let b = f.bit(k);
            f.words[(b / 64) as usize] |= 1 << (b % 64);
        }
        f.fpr_m = validation.iter().filter(|x| f.bitmap_contains(x)).count() as f64 / validation.len() as f64;
        if f.fpr_m > 0.0 {
            let rate = (p_star / f.fpr_m).min(1.0);
            f.fpr_b = Some(rate);
            if rate < 1.0 && !keys.is_empty() {
                let mut aux = StandardBloom::with_rate(keys.len(), rate, seed)?;
                keys.iter().for_each(|k| aux.insert(k));
                f.aux = Some(aux);
            }
        }
        Ok(f)
    }

    #[inline]
    fn bit(&self, key: &K) -> u64 {
        let d = (self.m as f64 * self.classifier.score(key)).floor();
        if d.is_nan() || d <= 0.0 {
            0
        } else {
            (d as u64).min(self.m - 1)
        }
    }

    pub fn bitmap_contains(&self, key: &K) -> bool {
        let b = self.bit(key);
        self.words[(b / 64) as usize] & (1 << (b % 64)) != 0
    }

    /// Fraction of validation non-keys landing on a set bit.
    pub fn fpr_m(&self) -> f64 {
        self.fpr_m
    }

    /// `min(1, p* / FPR_m)`; `None` when `FPR_m` is 0.
    pub fn fpr_b(&self) -> Option<f64> {
        self.fpr_b
    }

    /// True when no auxiliary filter was built, either because the bitmap
    /// alone rejected every validation non-key or because the required rate
    /// was 1.
    pub fn aux_skipped(&self) -> bool {
        self.aux.is_none()
    }

    pub fn bits_set(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn bitmap_bytes(&self) -> usize {
        bits_to_bytes(self.m)
    }
}

impl<K: FilterKey, C: KeyClassifier<K>> ExistenceFilter<K> for ModelHashBloom<K, C> {
    fn contains(&self, key: &K) -> bool {
        self.bitmap_contains(key) && self.aux.as_ref().is_none_or(|f| f.contains(key))
    }

    fn size_bytes(&self) -> usize {
        self.classifier.size_bytes() + self.bitmap_bytes() + self.aux.as_ref().map_or(0, StandardBloom::size_bytes)
    }

    fn kind(&self) -> &'static str {
        "model-hash"
    }
}
