use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const SCHEMES: [&str; 2] = ["http://", "https://"];
const KEY_TLDS: [&str; 5] = [".ru", ".xyz", ".top", ".biz", ".com"];
const NON_KEY_TLDS: [&str; 5] = [".com", ".org", ".net", ".edu", ".io"];
/// Letters favoured by each class; the other class draws them with the
/// complementary probability.
const KEY_LETTERS: &[u8] = b"bdfhjkqvwxz0123456789";
const NON_KEY_LETTERS: &[u8] = b"aceilmnoprstuy";
/// Probability that a letter comes from the class's own alphabet.
const BIAS: f64 = 0.8;

fn url(rng: &mut ChaCha8Rng, own: &[u8], other: &[u8], tlds: &[&str]) -> Vec<u8> {
    let mut s = SCHEMES[rng.random_range(0..SCHEMES.len())].as_bytes().to_vec();
    let len = rng.random_range(6..=20);
    for _ in 0..len {
        let pool = if rng.random_bool(BIAS) { own } else { other };
        s.push(pool[rng.random_range(0..pool.len())]);
    }
    s.extend_from_slice(tlds[rng.random_range(0..tlds.len())].as_bytes());
    if rng.random_bool(0.5) {
        s.push(b'/');
        for _ in 0..rng.random_range(1..8) {
            s.push(own[rng.random_range(0..own.len())]);
        }
    }
    s
}

/// URL-like keys and non-keys drawn from overlapping letter distributions,
/// so a classifier separates them well but not perfectly. All strings are
/// distinct; the output is deterministic per seed.
pub fn synthetic_url_corpus(n_keys: usize, n_non_keys: usize, seed: u64) -> Result<(Vec<Vec<u8>>, Vec<Vec<u8>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n_keys + n_non_keys);
    let cap = 100 * (n_keys + n_non_keys) + 1000;
    let mut draws = 0usize;
    let mut take = |n: usize, own: &[u8], other: &[u8], tlds: &[&str], rng: &mut ChaCha8Rng| -> Result<Vec<Vec<u8>>> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            draws += 1;
            if draws > cap {
                return Err(Error::UnsatisfiableUniqueness {
                    requested: n as u64,
                    capacity: out.len() as u64,
                });
            }
            let u = url(rng, own, other, tlds);
            if seen.insert(u.clone()) {
                out.push(u);
            }
        }
        Ok(out)
    };
    let keys = take(n_keys, KEY_LETTERS, NON_KEY_LETTERS, &KEY_TLDS, &mut rng)?;
    let non_keys = take(n_non_keys, NON_KEY_LETTERS, KEY_LETTERS, &NON_KEY_TLDS, &mut rng)?;
    Ok((keys, non_keys))
}
