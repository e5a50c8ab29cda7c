use std::sync::Arc;

use crate::error::{Error, Result};
use crate::search::ProbeCounter;

/// Block width of every level.
pub const BLOCK: usize = 64;

/// Three-level lookup table over sorted `u64` keys.
///
/// Level 1 holds every 64th key, padded with `u64::MAX` to a multiple of 64;
/// level 2 holds every 64th level-1 entry. A lookup binary-searches level 2
/// and then does a branch-free scan of one 64-entry block on each of level 1
/// and the data.
#[derive(Debug, Clone)]
pub struct LookupTable3 {
    data: Arc<[u64]>,
    l1: Vec<u64>,
    l2: Vec<u64>,
}

#[inline]
fn count_below<C: ProbeCounter>(block: &[u64], key: u64, c: &mut C) -> usize {
    let mut count = 0usize;
    for &x in block {
        c.probe();
        count += usize::from(x < key);
    }
    count
}

impl LookupTable3 {
    pub fn build(data: Arc<[u64]>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut l1: Vec<u64> = data.iter().step_by(BLOCK).copied().collect();
        l1.resize(l1.len().next_multiple_of(BLOCK), u64::MAX);
        let l2 = l1.iter().step_by(BLOCK).copied().collect();
        Ok(Self { data, l1, l2 })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Both table levels including padding; excludes the data.
    pub fn size_bytes(&self) -> usize {
        8 * (self.l1.len() + self.l2.len())
    }

    pub fn upper_bound<C: ProbeCounter>(&self, key: u64, counter: &mut C) -> usize {
        let (mut l, mut r) = (0, self.l2.len());
        while l < r {
            let mid = l + (r - l) / 2;
            counter.probe();
            if self.l2[mid] < key {
                l = mid + 1;
            } else {
                r = mid;
            }
        }
        if l == 0 {
            return 0;
        }
        let b2 = (l - 1) * BLOCK;
        let c1 = b2 + count_below(&self.l1[b2..b2 + BLOCK], key, counter);
        let b1 = (c1 - 1) * BLOCK;
        let end = (b1 + BLOCK).min(self.data.len());
        b1 + count_below(&self.data[b1..end], key, counter)
    }
}
