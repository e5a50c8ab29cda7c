//! Key datasets: synthetic generators and file loaders.
//!
//! Every constructor returns keys that are strictly ascending and unique.
//! Positions are 0-based: in a dense dataset starting at 1,000,000 the key
//! 1,000,009 sits at position 9 (the tenth record).

use std::collections::HashSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::error::{Error, Result};
use crate::key::IndexKey;

/// Bytes per record when none is given.
pub const DEFAULT_PAYLOAD_WIDTH: usize = 8;

/// Sorted, unique keys plus the width of the payload stored alongside each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset<K> {
    keys: Arc<[K]>,
    payload_width: usize,
}

impl<K: IndexKey> Dataset<K> {
    /// Wraps already-sorted keys, validating the invariants.
    pub fn new(keys: Vec<K>) -> Result<Self> {
        if keys.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(i) = keys.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotSorted { index: i + 1 });
        }
        Ok(Self {
            keys: keys.into(),
            payload_width: DEFAULT_PAYLOAD_WIDTH,
        })
    }

    /// Sorts and deduplicates `keys`. Returns the dataset and how many
    /// duplicates were dropped.
    pub fn from_unsorted(mut keys: Vec<K>) -> Result<(Self, usize)> {
        keys.sort_unstable();
        let before = keys.len();
        keys.dedup();
        let dropped = before - keys.len();
        Ok((Self::new(keys)?, dropped))
    }

    pub fn with_payload_width(mut self, payload_width: usize) -> Self {
        self.payload_width = payload_width;
        self
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    /// Shared handle to the key array.
    pub fn shared_keys(&self) -> Arc<[K]> {
        Arc::clone(&self.keys)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn payload_width(&self) -> usize {
        self.payload_width
    }

    /// Position of `key` if present.
    pub fn position_of(&self, key: &K) -> Option<usize> {
        self.keys.binary_search(key).ok()
    }
}

/// Samples `n` unique integer keys from `LogNormal(mu, sigma)`.
///
/// A first batch of `n` samples fixes the normalizer `max_sample`; every
/// sample `x` maps to `floor(x / max_sample * scale_max)`. Duplicates and
/// later samples beyond `scale_max` are rejected and redrawn until `n` unique
/// keys exist.
pub fn gen_lognormal(n: usize, mu: f64, sigma: f64, scale_max: u64, seed: u64) -> Result<Dataset<u64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(sigma > 0.0) || !sigma.is_finite() || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lognormal parameters must be finite with sigma > 0 (mu={mu}, sigma={sigma})"
        )));
    }
    if n as u64 > scale_max {
        return Err(Error::UnsatisfiableUniqueness {
            requested: n as u64,
            capacity: scale_max,
        });
    }
    let dist = LogNormal::new(mu, sigma)
        .map_err(|e| Error::InvalidArgument(format!("lognormal: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let first: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
    let max_sample = first.iter().copied().fold(f64::MIN, f64::max);
    let to_key = |x: f64| -> Option<u64> {
        let k = (x / max_sample * scale_max as f64).floor();
        (k >= 0.0 && k <= scale_max as f64).then_some(k as u64)
    };

    let mut seen = HashSet::with_capacity(n);
    let mut keys = Vec::with_capacity(n);
    for x in first {
        if let Some(k) = to_key(x) {
            if seen.insert(k) {
                keys.push(k);
            }
        }
    }
    let max_draws = (n as u64).saturating_mul(1000).max(1_000_000);
    let mut draws = 0u64;
    while keys.len() < n {
        draws += 1;
        if draws > max_draws {
            return Err(Error::UnsatisfiableUniqueness {
                requested: n as u64,
                capacity: keys.len() as u64,
            });
        }
        if let Some(k) = to_key(dist.sample(&mut rng)) {
            if seen.insert(k) {
                keys.push(k);
            }
        }
    }
    keys.sort_unstable();
    Dataset::new(keys)
}

/// Arithmetic sequence `start, start + step, ...` of length `n`.
pub fn gen_dense(n: usize, start: u64, step: u64) -> Result<Dataset<u64>> {
    if n == 0 || step == 0 {
        return Err(Error::InvalidArgument("need n >= 1 and step >= 1".into()));
    }
    let last = (n as u64 - 1)
        .checked_mul(step)
        .and_then(|span| span.checked_add(start))
        .ok_or_else(|| Error::InvalidArgument("dense sequence overflows u64".into()))?;
    debug_assert!(last >= start);
    Dataset::new((0..n as u64).map(|i| start + i * step).collect())
}

/// `n` unique random byte-strings over `alphabet` with lengths in
/// `min_len..=max_len`, sorted lexicographically.
pub fn gen_strings(
    n: usize,
    alphabet: &[u8],
    min_len: usize,
    max_len: usize,
    seed: u64,
) -> Result<Dataset<Vec<u8>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if alphabet.is_empty() || min_len == 0 || min_len > max_len {
        return Err(Error::InvalidArgument(
            "need a non-empty alphabet and 1 <= min_len <= max_len".into(),
        ));
    }
    let mut symbols = alphabet.to_vec();
    symbols.sort_unstable();
    symbols.dedup();
    let capacity = string_space(symbols.len() as u64, min_len, max_len);
    if n as u64 > capacity {
        return Err(Error::UnsatisfiableUniqueness {
            requested: n as u64,
            capacity,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n);
    while seen.len() < n {
        let len = rng.random_range(min_len..=max_len);
        let s: Vec<u8> = (0..len)
            .map(|_| symbols[rng.random_range(0..symbols.len())])
            .collect();
        seen.insert(s);
    }
    let mut keys: Vec<Vec<u8>> = seen.into_iter().collect();
    keys.sort_unstable();
    Dataset::new(keys)
}

fn string_space(alphabet: u64, min_len: usize, max_len: usize) -> u64 {
    let mut total = 0u64;
    for len in min_len..=max_len {
        let count = (0..len).try_fold(1u64, |acc, _| acc.checked_mul(alphabet));
        match count.and_then(|c| total.checked_add(c)) {
            Some(t) => total = t,
            None => return u64::MAX,
        }
    }
    total
}

/// On-disk key formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyFormat {
    /// Raw little-endian u64 stream, no header.
    BinaryU64Le,
    /// One integer per line.
    Csv,
    /// Newline-delimited raw byte strings.
    Lines,
}

impl std::str::FromStr for KeyFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" | "binary-u64-le" | "bin" => Ok(Self::BinaryU64Le),
            "csv" => Ok(Self::Csv),
            "lines" => Ok(Self::Lines),
            other => Err(Error::InvalidArgument(format!("unknown key format {other:?}"))),
        }
    }
}

/// A dataset loaded from disk, integer or string depending on the format.
#[derive(Debug, Clone)]
pub enum LoadedKeys {
    Int(Dataset<u64>),
    Str(Dataset<Vec<u8>>),
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub keys: LoadedKeys,
    pub duplicates_dropped: usize,
}

/// Reads keys from `path`, sorting and deduplicating them.
pub fn load_keys(path: &Path, format: KeyFormat) -> Result<Loaded> {
    let bytes = fs::read(path)?;
    let parse_err = |location: String, message: String| Error::Parse {
        path: path.to_path_buf(),
        location,
        message,
    };
    match format {
        KeyFormat::BinaryU64Le => {
            if bytes.len() % 8 != 0 {
                return Err(parse_err(
                    format!("offset {}", bytes.len() - bytes.len() % 8),
                    "trailing partial u64".into(),
                ));
            }
            let keys: Vec<u64> = bytes
                .chunks_exact(8)
                .map(|c| u64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect();
            if keys.is_empty() {
                return Err(Error::EmptyInput);
            }
            let (ds, dropped) = Dataset::from_unsorted(keys)?;
            Ok(Loaded {
                keys: LoadedKeys::Int(ds),
                duplicates_dropped: dropped,
            })
        }
        KeyFormat::Csv => {
            let text = std::str::from_utf8(&bytes)
                .map_err(|e| parse_err(format!("offset {}", e.valid_up_to()), "invalid UTF-8".into()))?;
            let mut keys = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let field = line.split(',').next().unwrap_or("").trim();
                if field.is_empty() {
                    continue;
                }
                let key = field
                    .parse::<u64>()
                    .map_err(|e| parse_err(format!("line {}", i + 1), format!("{e}: {field:?}")))?;
                keys.push(key);
            }
            if keys.is_empty() {
                return Err(Error::EmptyInput);
            }
            let (ds, dropped) = Dataset::from_unsorted(keys)?;
            Ok(Loaded {
                keys: LoadedKeys::Int(ds),
                duplicates_dropped: dropped,
            })
        }
        KeyFormat::Lines => {
            let keys: Vec<Vec<u8>> = split_lines(&bytes).map(<[u8]>::to_vec).collect();
            if keys.is_empty() {
                return Err(Error::EmptyInput);
            }
            let (ds, dropped) = Dataset::from_unsorted(keys)?;
            Ok(Loaded {
                keys: LoadedKeys::Str(ds),
                duplicates_dropped: dropped,
            })
        }
    }
}

/// LF-terminated records; a missing final terminator is tolerated and the
/// empty string after a trailing LF is not a record.
pub fn split_lines(bytes: &[u8]) -> impl Iterator<Item = &[u8]> {
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    let empty = bytes.is_empty();
    body.split(|&b| b == b'\n').filter(move |_| !empty)
}

/// Writes integer keys in the given format. `Lines` writes decimal text.
pub fn write_u64_keys(path: &Path, keys: &[u64], format: KeyFormat) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    match format {
        KeyFormat::BinaryU64Le => {
            for k in keys {
                out.write_all(&k.to_le_bytes())?;
            }
        }
        KeyFormat::Csv | KeyFormat::Lines => {
            for k in keys {
                writeln!(out, "{k}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes byte-string keys, one per line.
pub fn write_string_keys(path: &Path, keys: &[Vec<u8>]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for k in keys {
        out.write_all(k)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
