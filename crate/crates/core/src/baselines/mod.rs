//! Classical range indexes used as reference points.

mod btree;
mod interp_btree;
mod lookup_table;

pub use btree::{interpolation_count, BTreeIndex, NodeSearch, REFERENCE_PAGE_SIZE};
pub use interp_btree::FixedInterpBTree;
pub use lookup_table::LookupTable3;

/// Page sizes swept by the benchmarks.
pub const PAGE_SIZES: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];
