use std::sync::Arc;

use crate::error::{Error, Result};
use crate::key::IndexKey;
use crate::search::ProbeCounter;

/// Reference page size for comparisons.
pub const REFERENCE_PAGE_SIZE: usize = 128;

/// How a key is located inside a node or data page.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSearch {
    Binary,
    Interpolation,
}

#[derive(Debug, Clone)]
struct Level<K> {
    separators: Vec<K>,
    /// Start of each entry's child node in the level below, as an offset.
    /// Empty on the bottom level, whose entries are data pages.
    first_child: Vec<u32>,
}

/// Read-only B-tree over a sorted array with dense (100% full) pages.
///
/// Only the first key of every data page is indexed. A lookup yields the page
/// whose keys bracket the query, i.e. a min-error of 0 and a max-error of one
/// page, and the final position comes from searching inside that page.
#[derive(Debug, Clone)]
pub struct BTreeIndex<K> {
    data: Arc<[K]>,
    base: usize,
    len: usize,
    page_size: usize,
    search: NodeSearch,
    /// Top-down; the last level indexes data pages.
    levels: Vec<Level<K>>,
}

impl<K: IndexKey> BTreeIndex<K> {
    /// Indexes all of `data`.
    pub fn build(data: Arc<[K]>, page_size: usize) -> Result<Self> {
        let len = data.len();
        Self::build_range(data, 0, len, page_size, NodeSearch::Binary)
    }

    /// Indexes `data[base..base + len]`; positions returned are global.
    pub fn build_range(data: Arc<[K]>, base: usize, len: usize, page_size: usize, search: NodeSearch) -> Result<Self> {
        if page_size < 2 {
            return Err(Error::InvalidConfig(format!("page size must be >= 2, got {page_size}")));
        }
        if base + len > data.len() {
            return Err(Error::InvalidArgument(format!(
                "range {base}..{} exceeds {} keys",
                base + len,
                data.len()
            )));
        }
        let pages = len.div_ceil(page_size);
        let mut levels = Vec::new();
        if pages > 1 {
            let mut entries: Vec<K> = (0..pages).map(|p| data[base + p * page_size].clone()).collect();
            levels.push(Level {
                separators: entries.clone(),
                first_child: Vec::new(),
            });
            while entries.len() > page_size {
                let below = entries.len();
                entries = entries.iter().step_by(page_size).cloned().collect();
                let first_child = (0..entries.len())
                    .map(|e| {
                        u32::try_from(e * page_size)
                            .ok()
                            .filter(|&o| (o as usize) < below)
                            .ok_or_else(|| Error::InvalidArgument("B-tree level exceeds 32-bit offsets".into()))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                levels.push(Level {
                    separators: entries.clone(),
                    first_child,
                });
            }
            levels.reverse();
        }
        Ok(Self {
            data,
            base,
            len,
            page_size,
            search,
            levels,
        })
    }

    pub fn page_size(&self) -> usize {
        self.page_size
    }

    pub fn node_search(&self) -> NodeSearch {
        self.search
    }

    /// Levels including the data pages; a single page has height 1.
    pub fn height(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn num_pages(&self) -> usize {
        self.len.div_ceil(self.page_size)
    }

    /// First covered position and number of covered keys.
    pub fn span(&self) -> (usize, usize) {
        (self.base, self.len)
    }

    pub fn data(&self) -> &Arc<[K]> {
        &self.data
    }

    /// Separator bytes plus 4-byte child offsets. Excludes the data.
    pub fn size_bytes(&self) -> usize {
        self.levels
            .iter()
            .map(|l| l.separators.iter().map(IndexKey::stored_size).sum::<usize>() + 4 * l.first_child.len())
            .sum()
    }

    /// Entries `< key`, or `<= key` when `inclusive`.
    fn count<C: ProbeCounter>(&self, slice: &[K], key: &K, inclusive: bool, c: &mut C) -> usize {
        match self.search {
            NodeSearch::Binary => {
                let (mut l, mut r) = (0, slice.len());
                while l < r {
                    let mid = l + (r - l) / 2;
                    c.probe();
                    if slice[mid] < *key || (inclusive && slice[mid] == *key) {
                        l = mid + 1;
                    } else {
                        r = mid;
                    }
                }
                l
            }
            NodeSearch::Interpolation => interpolation_count(slice, key, inclusive, c),
        }
    }

    /// Global `[start, end)` of the last page whose first key is `<= key`
    /// (the first page if none). A present key lies in it, and the upper
    /// bound of any key lies in `start..=end`.
    pub fn find_page<C: ProbeCounter>(&self, key: &K, counter: &mut C) -> (usize, usize) {
        if self.len == 0 {
            return (self.base, self.base);
        }
        let mut node = 0usize;
        let mut page = 0usize;
        for (depth, level) in self.levels.iter().enumerate() {
            let end = (node + self.page_size).min(level.separators.len());
            let c = self.count(&level.separators[node..end], key, true, counter);
            let entry = node + c.max(1) - 1;
            if depth + 1 == self.levels.len() {
                page = entry;
            } else {
                node = level.first_child[entry] as usize;
            }
        }
        let start = self.base + page * self.page_size;
        let end = (start + self.page_size).min(self.base + self.len);
        (start, end)
    }

    /// Upper bound restricted to the covered range: a position in
    /// `base..=base + len`.
    pub fn upper_bound<C: ProbeCounter>(&self, key: &K, counter: &mut C) -> usize {
        let (start, end) = self.find_page(key, counter);
        start + self.count(&self.data[start..end], key, false, counter)
    }
}

/// Number of elements `< key` (or `<= key` when `inclusive`) in sorted
/// `slice`, by interpolation on the keys' scalar projection. Each guess is
/// kept away from the interval ends so progress is guaranteed.
pub fn interpolation_count<K: IndexKey, C: ProbeCounter>(slice: &[K], key: &K, inclusive: bool, c: &mut C) -> usize {
    let below = |x: &K| *x < *key || (inclusive && *x == *key);
    let (mut l, mut r) = (0usize, slice.len());
    let target = key.to_f64();
    while r - l > 8 {
        let lo_v = slice[l].to_f64();
        let hi_v = slice[r - 1].to_f64();
        let span = r - 1 - l;
        let guess = if hi_v > lo_v {
            let frac = ((target - lo_v) / (hi_v - lo_v)).clamp(0.0, 1.0);
            l + (frac * span as f64) as usize
        } else {
            l + span / 2
        };
        let m = guess.clamp(l + span / 16, l + span - span / 16);
        c.probe();
        if below(&slice[m]) {
            l = m + 1;
        } else {
            r = m;
        }
    }
    while l < r {
        let mid = l + (r - l) / 2;
        c.probe();
        if below(&slice[mid]) {
            l = mid + 1;
        } else {
            r = mid;
        }
    }
    l
}
