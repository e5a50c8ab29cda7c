//! Hash functions that map keys to slots, either by a scaled CDF model or by
//! a randomizing mixer, and chained hash maps built on them.

mod maps;

pub use maps::{ChainedHashMap, InPlaceChainedHashMap, MapStats, RECORD_BYTES};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::models::{CdfModel, Feature, ModelSpec};
use crate::rmi::{route_index, RmiConfig, RmiIndex};
use crate::search::reference_upper_bound;

/// Slot counts per key swept by the benchmarks.
pub const UTILIZATIONS: [f64; 3] = [0.75, 1.0, 1.25];

/// Largest second stage used for a learned hash function.
pub const MAX_HASH_LEAVES: usize = 100_000;

/// A function from keys to `0..num_slots()`.
pub trait SlotHash {
    fn slot(&self, key: u64) -> usize;
    fn num_slots(&self) -> usize;
    /// Bytes needed to store the function itself.
    fn size_bytes(&self) -> usize {
        0
    }
    fn kind(&self) -> &'static str;
}

impl<H: SlotHash + ?Sized> SlotHash for &H {
    fn slot(&self, key: u64) -> usize {
        (**self).slot(key)
    }

    fn num_slots(&self) -> usize {
        (**self).num_slots()
    }

    fn size_bytes(&self) -> usize {
        (**self).size_bytes()
    }

    fn kind(&self) -> &'static str {
        (**self).kind()
    }
}

/// Final avalanche step of MurmurHash3.
#[inline]
pub fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^ (k >> 33)
}

/// Maps a 64-bit hash uniformly onto `0..m`.
#[inline]
pub fn reduce(h: u64, m: usize) -> usize {
    ((h as u128 * m as u128) >> 64) as usize
}

#[derive(Debug, Clone, Copy)]
pub struct RandomHashFn {
    seed: u64,
    slots: usize,
}

impl RandomHashFn {
    pub fn new(slots: usize, seed: u64) -> Self {
        assert!(slots > 0, "need at least one slot");
        Self { seed, slots }
    }
}

impl SlotHash for RandomHashFn {
    #[inline]
    fn slot(&self, key: u64) -> usize {
        reduce(fmix64(key ^ fmix64(self.seed)), self.slots)
    }

    fn num_slots(&self) -> usize {
        self.slots
    }

    fn size_bytes(&self) -> usize {
        8
    }

    fn kind(&self) -> &'static str {
        "random"
    }
}

#[derive(Debug, Clone)]
enum Cdf {
    Rmi(RmiIndex<u64>),
    Model(CdfModel),
}

/// `h(K) = clamp(⌊F(K) · M⌋, 0, M − 1)` where `F` is a position model
/// divided by the number of keys it was trained on.
#[derive(Debug, Clone)]
pub struct LearnedHashFn {
    cdf: Cdf,
    n: usize,
    slots: usize,
}

impl LearnedHashFn {
    /// Two stages: a multivariate root and `min(n / 2, 100k)` linear leaves.
    pub fn default_config(n: usize) -> RmiConfig {
        let leaves = (n / 2).clamp(1, MAX_HASH_LEAVES);
        RmiConfig::linear(vec![1, leaves]).with_root(ModelSpec::Multivariate {
            candidates: Feature::ALL.to_vec(),
        })
    }

    pub fn train(keys: Arc<[u64]>, slots: usize, config: Option<RmiConfig>) -> Result<Self> {
        if slots == 0 {
            return Err(Error::InvalidArgument("need at least one slot".into()));
        }
        let n = keys.len();
        let config = config.unwrap_or_else(|| Self::default_config(n));
        let rmi = RmiIndex::build_from_keys(keys, config)?;
        Ok(Self {
            cdf: Cdf::Rmi(rmi),
            n,
            slots,
        })
    }

    /// Uses `model(key) / n` as `F`.
    pub fn from_model(model: CdfModel, n: usize, slots: usize) -> Self {
        assert!(n > 0 && slots > 0, "n and slots must be positive");
        Self {
            cdf: Cdf::Model(model),
            n,
            slots,
        }
    }

    /// `F(key)`, unclamped.
    pub fn cdf(&self, key: u64) -> f64 {
        self.raw(key) / self.n as f64
    }

    #[inline]
    fn raw(&self, key: u64) -> f64 {
        match &self.cdf {
            Cdf::Rmi(r) => r.predict_raw(&key),
            Cdf::Model(m) => m.predict(&key),
        }
    }
}

impl SlotHash for LearnedHashFn {
    #[inline]
    fn slot(&self, key: u64) -> usize {
        // ⌊(raw / n) · M⌋ evaluated as ⌊M · raw / n⌋ to stay exact on integers
        route_index(self.raw(key), self.slots, self.n)
    }

    fn num_slots(&self) -> usize {
        self.slots
    }

    fn size_bytes(&self) -> usize {
        match &self.cdf {
            Cdf::Rmi(r) => r.index_size_bytes(),
            Cdf::Model(m) => m.size_bytes(),
        }
    }

    fn kind(&self) -> &'static str {
        "learned"
    }
}

/// `F` = exact empirical CDF (rank / n) of the build keys.
#[derive(Debug, Clone)]
pub struct EmpiricalCdfHash {
    keys: Arc<[u64]>,
    slots: usize,
}

impl EmpiricalCdfHash {
    pub fn new(keys: Arc<[u64]>, slots: usize) -> Self {
        assert!(!keys.is_empty() && slots > 0, "need keys and slots");
        Self { keys, slots }
    }
}

impl SlotHash for EmpiricalCdfHash {
    fn slot(&self, key: u64) -> usize {
        route_index(reference_upper_bound(&self.keys, &key) as f64, self.slots, self.keys.len())
    }

    fn num_slots(&self) -> usize {
        self.slots
    }

    fn size_bytes(&self) -> usize {
        8 * self.keys.len()
    }

    fn kind(&self) -> &'static str {
        "empirical"
    }
}

/// Wraps an arbitrary slot function.
pub struct FnHash<F> {
    f: F,
    slots: usize,
}

impl<F: Fn(u64) -> usize> FnHash<F> {
    pub fn new(slots: usize, f: F) -> Self {
        assert!(slots > 0, "need at least one slot");
        Self { f, slots }
    }
}

impl<F: Fn(u64) -> usize> SlotHash for FnHash<F> {
    fn slot(&self, key: u64) -> usize {
        (self.f)(key).min(self.slots - 1)
    }

    fn num_slots(&self) -> usize {
        self.slots
    }

    fn kind(&self) -> &'static str {
        "custom"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConflictStats {
    /// Keys beyond the first in each slot: `Σ max(0, load − 1)`.
    pub colliding_keys: usize,
    pub occupied_slots: usize,
    pub empty_slots: usize,
}

impl ConflictStats {
    pub fn colliding_fraction(&self, n: usize) -> f64 {
        self.colliding_keys as f64 / n as f64
    }
}

/// Number of keys hashed to each slot.
pub fn slot_loads<H: SlotHash + ?Sized>(hash: &H, keys: &[u64]) -> Vec<u32> {
    let mut loads = vec![0u32; hash.num_slots()];
    for &k in keys {
        loads[hash.slot(k)] += 1;
    }
    loads
}

pub fn count_conflicts<H: SlotHash + ?Sized>(hash: &H, keys: &[u64]) -> ConflictStats {
    let loads = slot_loads(hash, keys);
    let occupied_slots = loads.iter().filter(|&&l| l > 0).count();
    ConflictStats {
        colliding_keys: keys.len() - occupied_slots,
        occupied_slots,
        empty_slots: loads.len() - occupied_slots,
    }
}
