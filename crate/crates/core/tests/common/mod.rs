//! Brute-force oracles over raw token rows. Nothing here goes through the
//! miners; support is recounted from the original rows every time.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use agraph_core::{Dataset, ItemId};

pub const SAMPLE: &str = "\
Milk Butter Sugar
Butter Beer
Butter Bread
Milk Butter Beer
Milk Bread
Butter Bread
Milk Bread
Milk Butter Bread Sugar
Milk Butter Bread
";

pub type Row = BTreeSet<String>;

pub fn rows_of(text: &str) -> Vec<Row> {
    text.lines()
        .map(|l| l.split_whitespace().map(str::to_owned).collect::<Row>())
        .filter(|r| !r.is_empty())
        .collect()
}

pub fn support(rows: &[Row], itemset: &BTreeSet<String>) -> u32 {
    rows.iter().filter(|r| itemset.is_subset(r)).count() as u32
}

/// Every itemset with support >= min, by exhaustive subset enumeration.
pub fn all_frequent(rows: &[Row], min: u32) -> BTreeMap<BTreeSet<String>, u32> {
    let universe: Vec<String> = rows
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    assert!(universe.len() <= 16, "oracle is exponential");
    let mut out = BTreeMap::new();
    for mask in 1u32..(1 << universe.len()) {
        let set: BTreeSet<String> = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, t)| t.clone())
            .collect();
        let c = support(rows, &set);
        if c >= min {
            out.insert(set, c);
        }
    }
    out
}

pub fn maximal(frequent: &BTreeMap<BTreeSet<String>, u32>) -> BTreeSet<BTreeSet<String>> {
    frequent
        .keys()
        .filter(|s| !frequent.keys().any(|o| o.len() > s.len() && s.is_subset(o)))
        .cloned()
        .collect()
}

pub fn names(ds: &Dataset, items: &[ItemId]) -> BTreeSet<String> {
    items
        .iter()
        .map(|&i| ds.token(i).unwrap().to_owned())
        .collect()
}

pub fn set(tokens: &[&str]) -> BTreeSet<String> {
    tokens.iter().map(|s| s.to_string()).collect()
}

/// Random rows over `n_items` tokens `i0..`, as text and parsed rows.
pub fn rows_from_indices(raw: &[Vec<u8>]) -> Vec<Vec<String>> {
    raw.iter()
        .map(|r| r.iter().map(|i| format!("i{i}")).collect())
        .collect()
}

/// The graph miner's output by definition, enumerated over item subsets:
/// maximal frequent sets of two or more items whose canonical-order sequence
/// follows qualifying edges and ends at a vertex with no forward edge.
/// Vertices are ordered by first appearance in `rows`.
pub fn graph_by_definition(rows: &[Vec<String>], min: u32) -> BTreeMap<BTreeSet<String>, u32> {
    let sets: Vec<Row> = rows.iter().map(|r| r.iter().cloned().collect()).collect();
    let mut order: Vec<String> = Vec::new();
    for t in rows.iter().flatten() {
        if !order.contains(t) {
            order.push(t.clone());
        }
    }
    order.retain(|t| support(&sets, &set(&[t])) >= min);
    assert!(order.len() <= 16, "oracle is exponential");
    let weight = |a: usize, b: usize| support(&sets, &set(&[&order[a], &order[b]]));
    let sink: Vec<bool> = (0..order.len())
        .map(|v| (v + 1..order.len()).all(|w| weight(v, w) < min))
        .collect();
    let mut accepted = BTreeMap::new();
    for mask in 1u32..(1 << order.len()) {
        let path: Vec<usize> = (0..order.len()).filter(|i| mask & (1 << i) != 0).collect();
        if path.len() < 2 || !sink[*path.last().unwrap()] {
            continue;
        }
        if path.windows(2).any(|w| weight(w[0], w[1]) < min) {
            continue;
        }
        let s: BTreeSet<String> = path.iter().map(|&i| order[i].clone()).collect();
        let c = support(&sets, &s);
        if c >= min {
            accepted.insert(s, c);
        }
    }
    let keep = maximal(&accepted);
    accepted.retain(|s, _| keep.contains(s));
    accepted
}
