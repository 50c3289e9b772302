//! Classic level-wise Apriori.
//!
//! Level `k` candidates come from joining level `k-1` itemsets that share
//! their first `k-2` items, then pruning any candidate with an infrequent
//! `(k-1)`-subset. Each level costs one database scan.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::dataset::{is_sorted_subset, Dataset, ItemId};
use crate::pattern::{Algorithm, Counters, Pattern, PatternSet};
use crate::{Error, Result};

/// One frequent itemset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// Items sorted by id.
    pub items: Box<[ItemId]>,
    /// Exact support count.
    pub count: u32,
}

/// All frequent itemsets, grouped by size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequentItemsetTable {
    levels: Vec<Vec<Entry>>,
    min_support_count: u32,
    counters: Counters,
}

impl FrequentItemsetTable {
    /// Levels in size order; `levels()[0]` holds the 1-itemsets. Trailing
    /// empty levels are not stored.
    pub fn levels(&self) -> &[Vec<Entry>] {
        &self.levels
    }

    /// Entries of size `k` (empty when `k` is out of range).
    pub fn level(&self, k: usize) -> &[Entry] {
        k.checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .map_or(&[][..], Vec::as_slice)
    }

    /// All entries, smallest itemsets first.
    pub fn iter(&self) -> impl Iterator<Item = &Entry> {
        self.levels.iter().flatten()
    }

    /// Total number of frequent itemsets.
    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// True when nothing is frequent.
    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Threshold the table was mined with.
    pub fn min_support_count(&self) -> u32 {
        self.min_support_count
    }

    /// Work counters; `db_scans` is the number of levels whose candidate set
    /// was non-empty.
    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// Count of an itemset given sorted by id, if frequent.
    pub fn count_of(&self, sorted: &[ItemId]) -> Option<u32> {
        let level = self.level(sorted.len());
        level
            .binary_search_by(|e| e.items[..].cmp(sorted))
            .ok()
            .map(|i| level[i].count)
    }
}

/// Mines every itemset with support `>= min_support_count`.
pub fn apriori_mine(dataset: &Dataset, min_support_count: u32) -> Result<FrequentItemsetTable> {
    if min_support_count == 0 {
        return Err(Error::ZeroSupportCount);
    }
    let mut counters = Counters::default();
    let mut levels: Vec<Vec<Entry>> = Vec::new();
    if dataset.num_items() == 0 {
        return Ok(FrequentItemsetTable {
            levels,
            min_support_count,
            counters,
        });
    }

    // level 1
    counters.db_scans += 1;
    let mut tally = vec![0u32; dataset.num_items()];
    for t in dataset.transactions() {
        for item in t.items() {
            tally[item.index()] += 1;
        }
    }
    let level1: Vec<Entry> = dataset
        .items()
        .filter(|i| tally[i.index()] >= min_support_count)
        .map(|i| Entry {
            items: Box::new([i]),
            count: tally[i.index()],
        })
        .collect();
    if level1.is_empty() {
        return Ok(FrequentItemsetTable {
            levels,
            min_support_count,
            counters,
        });
    }
    levels.push(level1);

    let mut relevant = vec![false; dataset.num_items()];
    let mut buf: Vec<ItemId> = Vec::new();
    let mut combo: Vec<usize> = Vec::new();
    loop {
        let prev = levels.last().expect("at least one level");
        let k = prev[0].items.len() + 1;
        let candidates = generate_candidates(prev);
        if candidates.is_empty() {
            break;
        }

        relevant.iter_mut().for_each(|r| *r = false);
        for e in prev {
            for i in e.items.iter() {
                relevant[i.index()] = true;
            }
        }
        let lookup: HashMap<&[ItemId], usize> = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (&c[..], i))
            .collect();
        let mut counts = vec![0u32; candidates.len()];

        counters.db_scans += 1;
        for t in dataset.transactions() {
            buf.clear();
            buf.extend(t.items().iter().copied().filter(|i| relevant[i.index()]));
            if buf.len() < k {
                continue;
            }
            if binomial_at_most(buf.len(), k, candidates.len()) {
                for_each_combination(&buf, k, &mut combo, |subset| {
                    if let Some(&ci) = lookup.get(subset) {
                        counts[ci] += 1;
                    }
                });
            } else {
                for (ci, c) in candidates.iter().enumerate() {
                    if is_sorted_subset(c, &buf) {
                        counts[ci] += 1;
                    }
                }
            }
        }
        drop(lookup);

        let level: Vec<Entry> = candidates
            .into_iter()
            .zip(counts)
            .filter(|&(_, c)| c >= min_support_count)
            .map(|(items, count)| Entry { items, count })
            .collect();
        if level.is_empty() {
            break;
        }
        levels.push(level);
    }

    Ok(FrequentItemsetTable {
        levels,
        min_support_count,
        counters,
    })
}

/// Prefix join plus subset pruning. Output is sorted lexicographically
/// because `prev` is.
fn generate_candidates(prev: &[Entry]) -> Vec<Box<[ItemId]>> {
    let k1 = prev[0].items.len();
    let known: HashSet<&[ItemId]> = prev.iter().map(|e| &e.items[..]).collect();
    let mut out = Vec::new();
    let mut sub: Vec<ItemId> = Vec::with_capacity(k1);
    let mut start = 0;
    while start < prev.len() {
        let prefix = &prev[start].items[..k1 - 1];
        let mut end = start + 1;
        while end < prev.len() && &prev[end].items[..k1 - 1] == prefix {
            end += 1;
        }
        for i in start..end {
            for j in i + 1..end {
                let mut cand: Vec<ItemId> = Vec::with_capacity(k1 + 1);
                cand.extend_from_slice(&prev[i].items);
                cand.push(prev[j].items[k1 - 1]);
                // dropping either of the last two items gives prev[i] / prev[j]
                let all_frequent = (0..k1.saturating_sub(1)).all(|drop| {
                    sub.clear();
                    sub.extend(
                        cand.iter()
                            .enumerate()
                            .filter(|&(p, _)| p != drop)
                            .map(|(_, &x)| x),
                    );
                    known.contains(&sub[..])
                });
                if all_frequent {
                    out.push(cand.into_boxed_slice());
                }
            }
        }
        start = end;
    }
    out
}

/// `C(n, k) <= limit`, without overflow.
fn binomial_at_most(n: usize, k: usize, limit: usize) -> bool {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > limit as u128 {
            return false;
        }
    }
    true
}

/// Calls `f` with every `k`-subset of `items`, in lexicographic order.
fn for_each_combination<F: FnMut(&[ItemId])>(
    items: &[ItemId],
    k: usize,
    idx: &mut Vec<usize>,
    mut f: F,
) {
    let n = items.len();
    if k == 0 || k > n {
        return;
    }
    idx.clear();
    idx.extend(0..k);
    let mut subset: Vec<ItemId> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&subset);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] != pos + n - k {
                break;
            }
            if pos == 0 {
                return;
            }
        }
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
        for p in pos..k {
            subset[p] = items[idx[p]];
        }
    }
}

/// Itemsets of the table not strictly contained in another entry, sorted
/// lexicographically by item id.
pub fn maximal_frequent(table: &FrequentItemsetTable) -> PatternSet {
    let mut patterns = Vec::new();
    let levels = table.levels();
    let mut sub: Vec<ItemId> = Vec::new();
    for (li, level) in levels.iter().enumerate() {
        let covered: HashSet<Box<[ItemId]>> = match levels.get(li + 1) {
            None => HashSet::new(),
            Some(next) => {
                let mut set = HashSet::new();
                for e in next {
                    for drop in 0..e.items.len() {
                        sub.clear();
                        sub.extend(
                            e.items
                                .iter()
                                .enumerate()
                                .filter(|&(p, _)| p != drop)
                                .map(|(_, &x)| x),
                        );
                        set.insert(sub.as_slice().into());
                    }
                }
                set
            }
        };
        for e in level {
            if !covered.contains(&e.items) {
                patterns.push(Pattern::new(e.items.to_vec(), e.count));
            }
        }
    }
    patterns.sort_by(|a, b| a.items().cmp(b.items()));
    PatternSet {
        patterns,
        algorithm: Algorithm::Apriori,
        counters: table.counters(),
    }
}
