use std::sync::Arc;

use super::btree::{BTreeIndex, NodeSearch};
use crate::error::{Error, Result};
use crate::key::IndexKey;
use crate::search::ProbeCounter;

/// Smallest and largest page sizes tried when fitting a byte budget.
const MIN_PAGE_LOG2: u32 = 4;
const MAX_PAGE_LOG2: u32 = 24;

/// B-tree with interpolation search inside every node, whose fanout (and so
/// height) is chosen so that the index fits a byte budget.
#[derive(Debug, Clone)]
pub struct FixedInterpBTree<K> {
    tree: BTreeIndex<K>,
    budget_bytes: usize,
}

impl<K: IndexKey> FixedInterpBTree<K> {
    /// Uses the smallest power-of-two page size whose index is within
    /// `budget_bytes`.
    pub fn build(data: Arc<[K]>, budget_bytes: usize) -> Result<Self> {
        let len = data.len();
        for log2 in MIN_PAGE_LOG2..=MAX_PAGE_LOG2 {
            let tree = BTreeIndex::build_range(data.clone(), 0, len, 1 << log2, NodeSearch::Interpolation)?;
            if tree.size_bytes() <= budget_bytes {
                return Ok(Self { tree, budget_bytes });
            }
        }
        Err(Error::InvalidConfig(format!(
            "no page size up to 2^{MAX_PAGE_LOG2} fits a {budget_bytes}-byte budget"
        )))
    }

    pub fn tree(&self) -> &BTreeIndex<K> {
        &self.tree
    }

    pub fn budget_bytes(&self) -> usize {
        self.budget_bytes
    }

    pub fn height(&self) -> usize {
        self.tree.height()
    }

    pub fn page_size(&self) -> usize {
        self.tree.page_size()
    }

    pub fn size_bytes(&self) -> usize {
        self.tree.size_bytes()
    }

    pub fn upper_bound<C: ProbeCounter>(&self, key: &K, counter: &mut C) -> usize {
        self.tree.upper_bound(key, counter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::reference_upper_bound;

    #[test]
    fn respects_budget() {
        let data: Arc<[u64]> = (0..200_000u64).map(|k| k * k).collect::<Vec<_>>().into();
        for budget in [1_000usize, 20_000, 150_000] {
            let t = FixedInterpBTree::build(data.clone(), budget).unwrap();
            assert!(t.size_bytes() <= budget);
            if t.page_size() > 16 {
                let smaller =
                    BTreeIndex::build_range(data.clone(), 0, data.len(), t.page_size() / 2, NodeSearch::Interpolation)
                        .unwrap();
                assert!(smaller.size_bytes() > budget);
            }
        }
    }

    #[test]
    fn matches_reference() {
        let keys: Vec<u64> = (0..60_000u64).map(|k| k * 5 + (k * k) % 3).collect();
        let t = FixedInterpBTree::build(keys.clone().into(), 4_096).unwrap();
        for q in (0..keys[keys.len() - 1] + 20).step_by(113) {
            assert_eq!(t.upper_bound(&q, &mut ()), reference_upper_bound(&keys, &q));
        }
        assert_eq!(t.upper_bound(&u64::MAX, &mut ()), keys.len());
    }

    #[test]
    fn string_keys() {
        let keys: Vec<Vec<u8>> = (0..5000u32).map(|i| format!("k{i:06}").into_bytes()).collect();
        let t = FixedInterpBTree::build(keys.clone().into(), 10_000).unwrap();
        for (i, k) in keys.iter().enumerate() {
            assert_eq!(t.upper_bound(k, &mut ()), i);
        }
        assert_eq!(t.upper_bound(&b"k".to_vec(), &mut ()), 0);
    }
}
