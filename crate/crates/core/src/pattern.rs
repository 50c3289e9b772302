//! Mined patterns and run instrumentation.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::dataset::{is_sorted_subset, ItemId};

/// Which miner produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Level-wise Apriori.
    Apriori,
    /// Co-occurrence graph miner.
    Graph,
}

impl Algorithm {
    /// Lowercase tag used in reports and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Apriori => "apriori",
            Algorithm::Graph => "graph",
        }
    }
}

/// Work counters collected during a mining run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Full database passes used to build the miner's structures.
    pub db_scans: u64,
    /// DFS node expansions (graph miner only).
    pub dfs_calls: u64,
    /// Matrix cells inspected while looking for children (graph miner only).
    pub edge_visits: u64,
    /// Leaf itemsets counted against the database (graph miner only).
    pub leaf_verifications: u64,
}

/// A frequent itemset with its exact support count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    items: Box<[ItemId]>,
    sorted: Box<[ItemId]>,
    count: u32,
}

impl Pattern {
    /// `items` in the miner's canonical order.
    pub fn new(items: Vec<ItemId>, count: u32) -> Self {
        let mut sorted = items.clone();
        sorted.sort_unstable();
        Pattern {
            items: items.into(),
            sorted: sorted.into(),
            count,
        }
    }

    /// Items in canonical order.
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    /// Items sorted by id.
    pub fn sorted_items(&self) -> &[ItemId] {
        &self.sorted
    }

    /// Support count.
    pub fn count(&self) -> u32 {
        self.count
    }

    /// Number of items.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Never true for mined patterns.
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Set inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Pattern) -> bool {
        is_sorted_subset(&self.sorted, &other.sorted)
    }
}

/// Output of a miner: patterns plus provenance and counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    /// Patterns in canonical order.
    pub patterns: Vec<Pattern>,
    /// Producing algorithm.
    pub algorithm: Algorithm,
    /// Instrumentation.
    pub counters: Counters,
}

impl PatternSet {
    /// Number of patterns.
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    /// True when nothing was found.
    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Whether no pattern is a subset of another.
    pub fn is_antichain(&self) -> bool {
        let p = &self.patterns;
        (0..p.len()).all(|i| (0..p.len()).all(|j| i == j || !p[i].is_subset_of(&p[j])))
    }
}

/// Drops every pattern that is contained in another one. Exact duplicates
/// keep their first occurrence. Input order is preserved otherwise.
pub fn antichain_filter(patterns: Vec<Pattern>) -> Vec<Pattern> {
    let mut by_len: Vec<usize> = (0..patterns.len()).collect();
    by_len.sort_by(|&a, &b| patterns[b].len().cmp(&patterns[a].len()).then(a.cmp(&b)));
    let mut keep = alloc::vec![false; patterns.len()];
    let mut kept: Vec<usize> = Vec::new();
    for i in by_len {
        if !kept.iter().any(|&k| patterns[i].is_subset_of(&patterns[k])) {
            keep[i] = true;
            kept.push(i);
        }
    }
    patterns
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}
