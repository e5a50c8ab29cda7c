use std::sync::Arc;

use serde::Serialize;

use learned_index::hash::{
    count_conflicts, ChainedHashMap, InPlaceChainedHashMap, LearnedHashFn, MapStats, RandomHashFn, SlotHash,
    UTILIZATIONS,
};

use crate::BenchError;

/// Payload stored with each key so lookups can be checked.
pub fn payload_of(key: u64) -> u64 {
    key.rotate_left(17) ^ 0x5eed
}

#[derive(Debug, Clone, Serialize)]
pub struct HashRow {
    pub hash_kind: String,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub conflicts: usize,
    pub empty_bytes: usize,
    pub avg_probe: f64,
    pub map: String,
    pub max_chain: usize,
    pub size_bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HashReport {
    pub seed: u64,
    pub rows: Vec<HashRow>,
    /// `1 − learned / random` colliding keys at one slot per key.
    pub conflict_reduction_at_full: f64,
}

fn check<F: Fn(u64) -> Option<u64>>(what: &str, keys: &[u64], get: F) -> Result<(), BenchError> {
    for &k in keys {
        if get(k) != Some(payload_of(k)) {
            return Err(BenchError::Correctness(format!("{what}: lost key {k}")));
        }
    }
    Ok(())
}

fn row(h: &dyn SlotHash, keys: &[u64], map: &str, stats: MapStats) -> HashRow {
    HashRow {
        hash_kind: h.kind().to_string(),
        n: keys.len(),
        m: h.num_slots(),
        conflicts: count_conflicts(h, keys).colliding_keys,
        empty_bytes: stats.empty_slot_bytes,
        avg_probe: stats.avg_probe_len,
        map: map.to_string(),
        max_chain: stats.max_chain,
        size_bytes: stats.size_bytes,
    }
}

/// Chained maps at every utilization and in-place maps at one slot per key,
/// for a learned and a random hash function.
pub fn bench_hash(keys: Arc<[u64]>, utilizations: &[f64], seed: u64) -> Result<HashReport, BenchError> {
    let n = keys.len();
    let payloads: Vec<u64> = keys.iter().map(|&k| payload_of(k)).collect();
    let mut rows = Vec::new();
    let mut reduction = f64::NAN;
    for &u in utilizations {
        let m = ((u * n as f64).round() as usize).max(1);
        let learned = LearnedHashFn::train(keys.clone(), m, None)?;
        let random = RandomHashFn::new(m, seed);
        for h in [&learned as &dyn SlotHash, &random] {
            let map = ChainedHashMap::build(h, &keys, &payloads)?;
            check(&format!("{} chained map", h.kind()), &keys, |k| map.get(k))?;
            rows.push(row(h, &keys, "chained", map.stats()));
            if m == n {
                let ip = InPlaceChainedHashMap::build(h, &keys, &payloads)?;
                check(&format!("{} in-place map", h.kind()), &keys, |k| ip.get(k))?;
                rows.push(row(h, &keys, "in-place", ip.stats()));
            }
        }
        if m == n {
            let l = count_conflicts(&learned, &keys).colliding_keys as f64;
            let r = count_conflicts(&random, &keys).colliding_keys as f64;
            reduction = if r > 0.0 { 1.0 - l / r } else { 0.0 };
        }
    }
    Ok(HashReport {
        seed,
        rows,
        conflict_reduction_at_full: reduction,
    })
}

pub fn default_utilizations() -> Vec<f64> {
    UTILIZATIONS.to_vec()
}
