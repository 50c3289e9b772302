//! Co-occurrence graph miner.
//!
//! Two database passes build the structures: [`frequent_items`] finds the
//! frequent single items (the graph's vertices, in a canonical order) and
//! [`build_cooccurrence`] counts every pair of frequent items that share a
//! transaction into an upper-triangular [`WeightMatrix`] (the edge weights),
//! recording alongside it which transactions hold each vertex.
//!
//! [`mine_patterns`] then walks the graph depth first from every vertex,
//! only ever moving forward in canonical order along edges whose weight
//! reaches the support threshold. A path with no qualifying child is a leaf.
//! Leaves of two or more items that are not already covered by an accepted
//! pattern are counted against the database, because pairwise-frequent edges
//! do not make the whole path frequent. Accepted leaves are finally reduced
//! to an antichain.
//!
//! Support of the current path is carried down the walk as an intersection
//! of per-vertex transaction bitmaps, so a leaf's verification is exact
//! without rereading the database. Once a path is infrequent, every leaf
//! beneath it would fail verification, so its subtree is not expanded.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, ItemId};
use crate::pattern::{antichain_filter, Algorithm, Counters, Pattern, PatternSet};
use crate::{Error, Result};

/// How frequent items are ordered into graph vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum VertexOrder {
    /// Order of first appearance in the dataset (item id order).
    #[default]
    FirstAppearance,
    /// Higher support first; ties by first appearance.
    SupportDescending,
    /// Listed items first in the given order, the remaining frequent items
    /// after them by first appearance. Infrequent or repeated entries are
    /// ignored.
    Explicit(Vec<ItemId>),
}

/// The frequent items of a dataset in canonical vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequentItemOrder {
    order: Vec<ItemId>,
    counts: Vec<u32>,
    position: Vec<Option<u32>>,
}

impl FrequentItemOrder {
    /// Items in vertex order.
    pub fn items(&self) -> &[ItemId] {
        &self.order
    }

    /// Support counts aligned with [`items`](Self::items).
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    /// True when no item is frequent.
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Vertex index of an item, if frequent.
    pub fn position(&self, item: ItemId) -> Option<usize> {
        self.position
            .get(item.index())
            .copied()
            .flatten()
            .map(|p| p as usize)
    }
}

/// First database pass: frequent items in first-appearance order.
pub fn frequent_items(dataset: &Dataset, min_support_count: u32) -> Result<FrequentItemOrder> {
    frequent_items_with(dataset, min_support_count, &VertexOrder::FirstAppearance)
}

/// First database pass with an explicit vertex ordering policy.
pub fn frequent_items_with(
    dataset: &Dataset,
    min_support_count: u32,
    policy: &VertexOrder,
) -> Result<FrequentItemOrder> {
    if min_support_count == 0 {
        return Err(Error::ZeroSupportCount);
    }
    let mut tally = vec![0u32; dataset.num_items()];
    for t in dataset.transactions() {
        for item in t.items() {
            tally[item.index()] += 1;
        }
    }
    let frequent = |i: &ItemId| tally[i.index()] >= min_support_count;
    let mut order: Vec<ItemId> = dataset.items().filter(frequent).collect();
    match policy {
        VertexOrder::FirstAppearance => {}
        VertexOrder::SupportDescending => {
            order.sort_by(|a, b| tally[b.index()].cmp(&tally[a.index()]).then(a.cmp(b)));
        }
        VertexOrder::Explicit(listed) => {
            let mut placed = vec![false; dataset.num_items()];
            let mut explicit = Vec::with_capacity(order.len());
            for &i in listed {
                if i.index() < tally.len() && frequent(&i) && !placed[i.index()] {
                    placed[i.index()] = true;
                    explicit.push(i);
                }
            }
            explicit.extend(order.iter().copied().filter(|i| !placed[i.index()]));
            order = explicit;
        }
    }
    let mut position = vec![None; dataset.num_items()];
    for (p, i) in order.iter().enumerate() {
        position[i.index()] = Some(p as u32);
    }
    let counts = order.iter().map(|i| tally[i.index()]).collect();
    Ok(FrequentItemOrder {
        order,
        counts,
        position,
    })
}

/// Pair co-occurrence counts over the frequent items, upper triangle only,
/// plus a transaction bitmap per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    dim: usize,
    cells: Vec<u32>,
    words: usize,
    tids: Vec<u64>,
}

impl WeightMatrix {
    fn zeros(dim: usize, transactions: usize) -> Self {
        let words = transactions.div_ceil(64);
        WeightMatrix {
            dim,
            cells: vec![0; dim * dim.saturating_sub(1) / 2],
            words,
            tids: vec![0; dim * words],
        }
    }

    fn tids(&self, vertex: usize) -> &[u64] {
        &self.tids[vertex * self.words..(vertex + 1) * self.words]
    }

    #[inline]
    fn offset(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < col && col < self.dim);
        row * (2 * self.dim - row - 1) / 2 + (col - row - 1)
    }

    /// Side length (number of frequent items).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Weight of cell `(row, col)` by vertex index. Zero on and below the
    /// diagonal or out of range.
    #[inline]
    pub fn weight(&self, row: usize, col: usize) -> u32 {
        if row < col && col < self.dim {
            self.cells[self.offset(row, col)]
        } else {
            0
        }
    }

    /// Number of transactions containing both items, looked up through the
    /// vertex order. `None` if either item is infrequent.
    pub fn pair_weight(&self, order: &FrequentItemOrder, a: ItemId, b: ItemId) -> Option<u32> {
        let (pa, pb) = (order.position(a)?, order.position(b)?);
        Some(self.weight(pa.min(pb), pa.max(pb)))
    }
}

/// Second database pass: every pair of frequent items sharing a transaction
/// bumps the cell `(earlier vertex, later vertex)`.
pub fn build_cooccurrence(dataset: &Dataset, order: &FrequentItemOrder) -> WeightMatrix {
    let mut matrix = WeightMatrix::zeros(order.len(), dataset.len());
    let mut positions: Vec<usize> = Vec::new();
    for (row_index, t) in dataset.transactions().iter().enumerate() {
        positions.clear();
        positions.extend(t.items().iter().filter_map(|&i| order.position(i)));
        positions.sort_unstable();
        let (word, bit) = (row_index / 64, 1u64 << (row_index % 64));
        for &v in &positions {
            matrix.tids[v * matrix.words + word] |= bit;
        }
        for (a, &row) in positions.iter().enumerate() {
            for &col in &positions[a + 1..] {
                let off = matrix.offset(row, col);
                matrix.cells[off] += 1;
            }
        }
    }
    matrix
}

/// Runs the whole graph miner: two construction passes, then the walk.
pub fn mine_graph(
    dataset: &Dataset,
    min_support_count: u32,
    policy: &VertexOrder,
) -> Result<PatternSet> {
    let order = frequent_items_with(dataset, min_support_count, policy)?;
    let matrix = build_cooccurrence(dataset, &order);
    mine_patterns(dataset, &order, &matrix, min_support_count)
}

/// Depth-first pattern search over the weight matrix.
///
/// Accepted patterns carry verified support counts, are listed in canonical
/// order and form an antichain. `db_scans` is always 2 (the construction
/// passes); leaf verifications are counted separately.
///
/// # Panics
///
/// If `matrix` was not built by [`build_cooccurrence`] from `dataset` and
/// `order`.
pub fn mine_patterns(
    dataset: &Dataset,
    order: &FrequentItemOrder,
    matrix: &WeightMatrix,
    min_support_count: u32,
) -> Result<PatternSet> {
    if min_support_count == 0 {
        return Err(Error::ZeroSupportCount);
    }
    check_built_from(dataset, order, matrix);
    let mut walk = Walk::new(order, matrix, min_support_count);
    for root in 0..order.len() {
        walk.run_root(root);
    }
    Ok(walk.finish())
}

/// Patterns found from a single root vertex, with only that root's own
/// accepted patterns used to skip redundant leaves.
///
/// Roots are independent under this entry point, so they can be mined in
/// parallel and merged with [`merge_roots`]; the merged result equals
/// [`mine_patterns`].
pub fn mine_root(
    dataset: &Dataset,
    order: &FrequentItemOrder,
    matrix: &WeightMatrix,
    min_support_count: u32,
    root: usize,
) -> Result<(Vec<Pattern>, Counters)> {
    if min_support_count == 0 {
        return Err(Error::ZeroSupportCount);
    }
    check_built_from(dataset, order, matrix);
    let mut walk = Walk::new(order, matrix, min_support_count);
    if root < order.len() {
        walk.run_root(root);
    }
    Ok((walk.accepted, walk.counters))
}

fn check_built_from(dataset: &Dataset, order: &FrequentItemOrder, matrix: &WeightMatrix) {
    assert!(
        matrix.dim == order.len() && matrix.words == dataset.len().div_ceil(64),
        "weight matrix was not built from this dataset and vertex order"
    );
}

/// Combines per-root results from [`mine_root`] into one [`PatternSet`].
pub fn merge_roots<I>(order: &FrequentItemOrder, parts: I) -> PatternSet
where
    I: IntoIterator<Item = (Vec<Pattern>, Counters)>,
{
    let mut all = Vec::new();
    let mut counters = Counters::default();
    for (patterns, c) in parts {
        all.extend(patterns);
        counters.dfs_calls += c.dfs_calls;
        counters.edge_visits += c.edge_visits;
        counters.leaf_verifications += c.leaf_verifications;
    }
    counters.db_scans = 2;
    finish_patterns(order, all, counters)
}

fn finish_patterns(
    order: &FrequentItemOrder,
    accepted: Vec<Pattern>,
    counters: Counters,
) -> PatternSet {
    let mut patterns = antichain_filter(accepted);
    let key = |p: &Pattern| -> Vec<usize> {
        p.items()
            .iter()
            .filter_map(|&i| order.position(i))
            .collect()
    };
    patterns.sort_by_cached_key(key);
    PatternSet {
        patterns,
        algorithm: Algorithm::Graph,
        counters,
    }
}

struct Frame {
    vertex: usize,
    next: usize,
    children: u32,
}

struct Walk<'a> {
    order: &'a FrequentItemOrder,
    matrix: &'a WeightMatrix,
    min: u32,
    has_child: Vec<bool>,
    accepted: Vec<Pattern>,
    // vertex -> indices into `accepted` containing it
    containing: Vec<Vec<u32>>,
    counters: Counters,
    path: Vec<usize>,
    // transaction bitmap of path[..=d] at d * words
    masks: Vec<u64>,
    counts: Vec<u32>,
    stack: Vec<Frame>,
}

impl<'a> Walk<'a> {
    fn new(order: &'a FrequentItemOrder, matrix: &'a WeightMatrix, min: u32) -> Self {
        let has_child = (0..matrix.dim())
            .map(|v| (v + 1..matrix.dim()).any(|w| matrix.weight(v, w) >= min))
            .collect();
        Walk {
            order,
            matrix,
            min,
            has_child,
            accepted: Vec::new(),
            containing: vec![Vec::new(); order.len()],
            counters: Counters {
                db_scans: 2,
                ..Counters::default()
            },
            path: Vec::new(),
            masks: Vec::new(),
            counts: Vec::new(),
            stack: Vec::new(),
        }
    }

    fn run_root(&mut self, root: usize) {
        self.push(root);
        while let Some(top) = self.stack.last_mut() {
            let v = top.vertex;
            let mut child = None;
            while top.next < self.matrix.dim() {
                let w = top.next;
                top.next += 1;
                self.counters.edge_visits += 1;
                if self.matrix.weight(v, w) >= self.min && !self.path.contains(&w) {
                    top.children += 1;
                    child = Some(w);
                    break;
                }
            }
            match child {
                Some(w) => self.push(w),
                None => {
                    let frame = self.stack.pop().expect("non-empty stack");
                    if frame.children == 0 {
                        self.leaf();
                    }
                    self.pop_path();
                }
            }
        }
    }

    fn push(&mut self, vertex: usize) {
        self.counters.dfs_calls += 1;
        let words = self.matrix.words;
        let depth = self.path.len();
        let tids = self.matrix.tids(vertex);
        let count = if depth == 0 {
            self.masks.extend_from_slice(tids);
            self.order.counts()[vertex]
        } else {
            let base = (depth - 1) * words;
            let mut count = 0;
            for (i, &t) in tids.iter().enumerate() {
                let m = self.masks[base + i] & t;
                count += m.count_ones();
                self.masks.push(m);
            }
            count
        };
        self.path.push(vertex);
        self.counts.push(count);
        if count >= self.min {
            self.stack.push(Frame {
                vertex,
                next: vertex + 1,
                children: 0,
            });
        } else {
            // nothing below an infrequent path can be accepted
            if !self.has_child[vertex] {
                self.counters.leaf_verifications += 1;
            }
            self.pop_path();
        }
    }

    fn pop_path(&mut self) {
        self.path.pop();
        self.counts.pop();
        self.masks.truncate(self.path.len() * self.matrix.words);
    }

    fn covered(&self) -> bool {
        // intersect the containment lists of the path's vertices
        let Some(shortest) = self.path.iter().min_by_key(|&&v| self.containing[v].len()) else {
            return false;
        };
        self.containing[*shortest].iter().any(|&idx| {
            self.path
                .iter()
                .all(|&v| self.containing[v].binary_search(&idx).is_ok())
        })
    }

    fn leaf(&mut self) {
        if self.path.len() < 2 || self.covered() {
            return;
        }
        self.counters.leaf_verifications += 1;
        let count = *self.counts.last().expect("non-empty path");
        let idx = self.accepted.len() as u32;
        for &v in &self.path {
            self.containing[v].push(idx);
        }
        let items = self.path.iter().map(|&p| self.order.items()[p]).collect();
        self.accepted.push(Pattern::new(items, count));
    }

    fn finish(self) -> PatternSet {
        finish_patterns(self.order, self.accepted, self.counters)
    }
}
