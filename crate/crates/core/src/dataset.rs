//! Interned transaction databases and support counting.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::{Error, Result};

/// Dense index of an item token within one [`Dataset`].
///
/// Ids are handed out in first-appearance order while loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(u32);

impl ItemId {
    /// Wraps a raw index.
    pub const fn new(index: u32) -> Self {
        ItemId(index)
    }

    /// The raw index.
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

/// One row of the database. Items are unique and sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    tid: u32,
    items: Box<[ItemId]>,
}

impl Transaction {
    /// 1-based ordinal among accepted rows.
    pub fn tid(&self) -> u32 {
        self.tid
    }

    /// Items, sorted ascending by id.
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    /// Whether every item of the sorted slice `itemset` occurs here.
    pub fn contains_sorted(&self, itemset: &[ItemId]) -> bool {
        is_sorted_subset(itemset, &self.items)
    }
}

/// `needle ⊆ haystack` for two ascending slices.
pub(crate) fn is_sorted_subset<T: Ord>(needle: &[T], haystack: &[T]) -> bool {
    if needle.len() > haystack.len() {
        return false;
    }
    let mut hay = haystack.iter();
    'outer: for n in needle {
        for h in hay.by_ref() {
            match h.cmp(n) {
                core::cmp::Ordering::Less => continue,
                core::cmp::Ordering::Equal => continue 'outer,
                core::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// An immutable, interned transaction database.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    transactions: Vec<Transaction>,
    tokens: Vec<String>,
    index: HashMap<String, ItemId>,
    tally: Vec<u32>,
}

impl Dataset {
    /// Builds a dataset from rows of tokens. Rows that end up empty are
    /// skipped.
    pub fn from_rows<I, R, S>(rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut builder = DatasetBuilder::new();
        for row in rows {
            builder.push_row(row);
        }
        builder.finish()
    }

    /// Number of transactions.
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    /// True when there are no transactions.
    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Number of distinct items.
    pub fn num_items(&self) -> usize {
        self.tokens.len()
    }

    /// Transactions in tid order.
    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    /// Token of an item.
    pub fn token(&self, id: ItemId) -> Option<&str> {
        self.tokens.get(id.index()).map(String::as_str)
    }

    /// Id of a token.
    pub fn item(&self, token: &str) -> Option<ItemId> {
        self.index.get(token).copied()
    }

    /// All item ids in first-appearance order.
    pub fn items(&self) -> impl ExactSizeIterator<Item = ItemId> + '_ {
        (0..self.tokens.len() as u32).map(ItemId)
    }

    /// Per-item transaction counts tallied while loading.
    pub fn load_tally(&self, id: ItemId) -> Option<u32> {
        self.tally.get(id.index()).copied()
    }

    /// Looks up several tokens at once.
    pub fn itemset(&self, tokens: &[&str]) -> Option<Vec<ItemId>> {
        tokens.iter().map(|t| self.item(t)).collect()
    }

    /// Resolves ids back to tokens.
    pub fn tokens_of(&self, items: &[ItemId]) -> Vec<&str> {
        items.iter().filter_map(|&i| self.token(i)).collect()
    }

    /// Number of transactions containing every item of `itemset`.
    pub fn support_count(&self, itemset: &[ItemId]) -> Result<u32> {
        if itemset.is_empty() {
            return Err(Error::EmptyItemset);
        }
        if let Some(&bad) = itemset.iter().find(|i| i.index() >= self.tokens.len()) {
            return Err(Error::UnknownItem(bad));
        }
        let mut sorted: Vec<ItemId> = itemset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(self.count_sorted(&sorted))
    }

    /// Full scan counting transactions that contain the ascending, valid,
    /// non-empty `itemset`.
    pub(crate) fn count_sorted(&self, itemset: &[ItemId]) -> u32 {
        self.transactions
            .iter()
            .filter(|t| t.contains_sorted(itemset))
            .count() as u32
    }

    /// Serializes back to the basket format: one line per transaction,
    /// tokens in id order separated by single spaces.
    pub fn to_basket_text(&self) -> String {
        let mut out = String::new();
        for t in &self.transactions {
            for (i, item) in t.items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&self.tokens[item.index()]);
            }
            out.push('\n');
        }
        out
    }
}

/// Incremental [`Dataset`] construction with first-appearance interning.
#[derive(Debug, Default)]
pub struct DatasetBuilder {
    data: Dataset,
    scratch: Vec<ItemId>,
}

impl DatasetBuilder {
    /// Empty builder.
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `token`, assigning the next id on first sight.
    pub fn intern(&mut self, token: &str) -> ItemId {
        if let Some(&id) = self.data.index.get(token) {
            return id;
        }
        let id = ItemId(self.data.tokens.len() as u32);
        self.data.tokens.push(String::from(token));
        self.data.index.insert(String::from(token), id);
        self.data.tally.push(0);
        id
    }

    /// Adds one row; duplicate tokens collapse. Returns the new tid, or
    /// `None` if the row had no tokens.
    pub fn push_row<R, S>(&mut self, row: R) -> Option<u32>
    where
        R: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.scratch.clear();
        for token in row {
            let id = self.intern(token.as_ref());
            self.scratch.push(id);
        }
        if self.scratch.is_empty() {
            return None;
        }
        self.scratch.sort_unstable();
        self.scratch.dedup();
        for id in &self.scratch {
            self.data.tally[id.index()] += 1;
        }
        let tid = self.data.transactions.len() as u32 + 1;
        self.data.transactions.push(Transaction {
            tid,
            items: self.scratch.as_slice().into(),
        });
        Some(tid)
    }

    /// Finishes the dataset.
    pub fn finish(self) -> Dataset {
        self.data
    }
}

/// Result of [`load_baskets`]: the dataset plus 1-based line numbers of
/// lines that were skipped with a warning.
#[derive(Debug, Clone)]
pub struct LoadedBaskets {
    /// The loaded data.
    pub dataset: Dataset,
    /// Non-empty lines that held no tokens (whitespace only).
    pub skipped_lines: Vec<usize>,
}

/// Parses the basket format.
///
/// One transaction per line, tokens separated by runs of spaces or tabs.
/// Blank lines and lines starting with `#` are ignored. `\r\n` endings are
/// accepted.
pub fn load_baskets(input: &[u8]) -> Result<LoadedBaskets> {
    let text = core::str::from_utf8(input).map_err(|e| Error::InvalidUtf8 {
        offset: e.valid_up_to(),
    })?;
    let mut builder = DatasetBuilder::new();
    let mut skipped_lines = Vec::new();
    for (lineno, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() || line.trim_start_matches([' ', '\t']).starts_with('#') {
            continue;
        }
        let tokens = line.split([' ', '\t']).filter(|t| !t.is_empty());
        if builder.push_row(tokens).is_none() {
            skipped_lines.push(lineno + 1);
        }
    }
    Ok(LoadedBaskets {
        dataset: builder.finish(),
        skipped_lines,
    })
}
