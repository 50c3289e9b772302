//! Frequent pattern mining over transaction databases.
//!
//! Two miners share one [`Dataset`]:
//!
//! * [`apriori`]: classic level-wise Apriori (join + prune candidate
//!   generation, one database scan per level).
//! * [`graph`]: the co-occurrence graph miner. One pass finds the frequent
//!   items, a second pass fills an upper-triangular pair-count matrix, then a
//!   forward-only depth-first walk over that matrix proposes patterns which are
//!   verified against the database and filtered down to an antichain.
//!
//! [`rules`] turns mined patterns into association rules with exact rational
//! confidences.
//!
//! The crate is `no_std` and only needs `alloc`; file IO, log parsing and the
//! command line live in the companion toolkit crate.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod apriori;
pub mod dataset;
mod error;
pub mod fraction;
pub mod graph;
pub mod pattern;
pub mod rules;

pub use apriori::{apriori_mine, maximal_frequent, FrequentItemsetTable};
pub use dataset::{load_baskets, Dataset, DatasetBuilder, ItemId, LoadedBaskets, Transaction};
pub use error::Error;
pub use fraction::{min_count, Fraction, SupportThreshold, Thresholds};
pub use graph::{
    build_cooccurrence, frequent_items, frequent_items_with, merge_roots, mine_graph,
    mine_patterns, mine_root, FrequentItemOrder, VertexOrder, WeightMatrix,
};
pub use pattern::{antichain_filter, Algorithm, Counters, Pattern, PatternSet};
pub use rules::{confidence, generate_rules, Rule};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
