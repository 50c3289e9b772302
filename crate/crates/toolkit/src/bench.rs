//! Time and memory comparison of the two miners.
//!
//! Each (dataset, algorithm) cell runs the full mine + rules pipeline on the
//! calling thread. Wall time uses [`Instant`]; memory is the allocator
//! high-water mark above the pre-cell baseline (see [`crate::memory`]).
//! After the cells, a differential check compares every graph-miner pattern
//! against the Apriori table of the same dataset.

use std::collections::BTreeSet;
use std::fs::OpenOptions;
use std::io::{self, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use agraph_core::{
    apriori_mine, maximal_frequent, Algorithm, Counters, Dataset, FrequentItemsetTable, PatternSet,
    Thresholds, VertexOrder,
};

use crate::memory;
use crate::pipeline::run_pipeline;

/// A labelled dataset to benchmark.
#[derive(Debug, Clone)]
pub struct BenchInput {
    /// Label written to the report.
    pub label: String,
    /// The data.
    pub dataset: Dataset,
    /// Size of the serialized input in bytes.
    pub input_bytes: u64,
}

impl BenchInput {
    /// Labels a dataset; size is taken from its basket serialization.
    pub fn new(label: impl Into<String>, dataset: Dataset) -> Self {
        let input_bytes = dataset.to_basket_text().len() as u64;
        BenchInput {
            label: label.into(),
            dataset,
            input_bytes,
        }
    }
}

/// One report row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    /// Dataset label.
    pub dataset_label: String,
    /// Transactions in the dataset.
    pub n_transactions: usize,
    /// Serialized input size.
    pub input_bytes: u64,
    /// Algorithm of this cell.
    pub algorithm: Algorithm,
    /// Wall time of mine + rules, milliseconds.
    pub wall_time_ms: f64,
    /// Peak heap above baseline, bytes.
    pub peak_memory_bytes: u64,
    /// Patterns produced.
    pub n_patterns: usize,
    /// Rules produced.
    pub n_rules: usize,
    /// Miner counters.
    pub counters: Counters,
    /// Failure message; other fields are zero when set.
    pub error: Option<String>,
}

/// Kind of differential finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscrepancyKind {
    /// A maximal frequent itemset (two or more items) the graph miner did not
    /// report.
    Missed,
    /// A graph-miner pattern that is not frequent per Apriori.
    Unsound,
}

impl DiscrepancyKind {
    /// Lowercase tag.
    pub fn as_str(self) -> &'static str {
        match self {
            DiscrepancyKind::Missed => "missed",
            DiscrepancyKind::Unsound => "unsound",
        }
    }
}

/// One differential finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    /// Dataset label.
    pub dataset_label: String,
    /// Finding kind.
    pub kind: DiscrepancyKind,
    /// Item tokens, sorted.
    pub items: Vec<String>,
    /// Support count.
    pub count: u32,
}

/// Benchmark output.
#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    /// One row per (dataset, algorithm).
    pub rows: Vec<BenchRow>,
    /// Differential findings.
    pub discrepancies: Vec<Discrepancy>,
}

impl BenchReport {
    /// Cells that failed.
    pub fn failures(&self) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    /// The row of a dataset/algorithm pair.
    pub fn row(&self, label: &str, algorithm: Algorithm) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.dataset_label == label && r.algorithm == algorithm)
    }
}

/// Runs every algorithm on every dataset, then the differential check.
pub fn run_benchmark(
    inputs: &[BenchInput],
    thresholds: &Thresholds,
    algorithms: &[Algorithm],
) -> BenchReport {
    let mut report = BenchReport::default();
    for input in inputs {
        let mut apriori_table: Option<FrequentItemsetTable> = None;
        let mut graph_patterns: Option<PatternSet> = None;
        for &algorithm in algorithms {
            let base = memory::reset_peak();
            let start = Instant::now();
            let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
                run_pipeline(
                    &input.dataset,
                    thresholds,
                    algorithm,
                    &VertexOrder::FirstAppearance,
                )
            }));
            let elapsed = start.elapsed();
            let peak = memory::peak_bytes().saturating_sub(base) as u64;
            let mut row = BenchRow {
                dataset_label: input.label.clone(),
                n_transactions: input.dataset.len(),
                input_bytes: input.input_bytes,
                algorithm,
                wall_time_ms: 0.0,
                peak_memory_bytes: 0,
                n_patterns: 0,
                n_rules: 0,
                counters: Counters::default(),
                error: None,
            };
            match outcome {
                Ok(Ok(out)) => {
                    row.wall_time_ms = elapsed.as_secs_f64() * 1000.0;
                    row.peak_memory_bytes = peak;
                    row.n_patterns = out.patterns.len();
                    row.n_rules = out.rules.len();
                    row.counters = out.patterns.counters;
                    match algorithm {
                        Algorithm::Apriori => apriori_table = out.table,
                        Algorithm::Graph => graph_patterns = Some(out.patterns),
                    }
                }
                Ok(Err(e)) => row.error = Some(e.to_string()),
                Err(p) => {
                    let msg = p
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| p.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "panic".to_owned());
                    row.error = Some(msg);
                }
            }
            report.rows.push(row);
        }
        if let Some(graph) = graph_patterns {
            let min = thresholds.min_support_count(input.dataset.len());
            let table = match apriori_table {
                Some(t) => Some(t),
                None => apriori_mine(&input.dataset, min).ok(),
            };
            if let Some(table) = table {
                report.discrepancies.extend(differential(
                    &input.label,
                    &input.dataset,
                    &table,
                    &graph,
                ));
            }
        }
    }
    report
}

/// Graph-miner patterns checked against an Apriori table.
pub fn differential(
    label: &str,
    dataset: &Dataset,
    table: &FrequentItemsetTable,
    graph: &PatternSet,
) -> Vec<Discrepancy> {
    let tokens = |items: &[agraph_core::ItemId]| -> Vec<String> {
        let mut v: Vec<String> = dataset
            .tokens_of(items)
            .into_iter()
            .map(str::to_owned)
            .collect();
        v.sort();
        v
    };
    let mut out = Vec::new();
    for p in &graph.patterns {
        if table.count_of(p.sorted_items()) != Some(p.count()) {
            out.push(Discrepancy {
                dataset_label: label.to_owned(),
                kind: DiscrepancyKind::Unsound,
                items: tokens(p.items()),
                count: p.count(),
            });
        }
    }
    let found: BTreeSet<&[agraph_core::ItemId]> =
        graph.patterns.iter().map(|p| p.sorted_items()).collect();
    for m in maximal_frequent(table)
        .patterns
        .iter()
        .filter(|m| m.len() >= 2)
    {
        if !found.contains(m.sorted_items()) {
            out.push(Discrepancy {
                dataset_label: label.to_owned(),
                kind: DiscrepancyKind::Missed,
                items: tokens(m.items()),
                count: m.count(),
            });
        }
    }
    out
}

/// Report CSV columns.
pub const CSV_HEADER: [&str; 12] = [
    "dataset_label",
    "n_transactions",
    "input_bytes",
    "algorithm",
    "wall_time_ms",
    "peak_memory_bytes",
    "n_patterns",
    "n_rules",
    "db_scans",
    "dfs_calls",
    "edge_visits",
    "leaf_verifications",
];

/// Appends rows to a report CSV, writing the metric comment and header
/// first when the file is new or empty. Failed cells get empty measurement
/// fields.
pub fn append_report_csv(path: &Path, report: &BenchReport) -> io::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let fresh = file.metadata()?.len() == 0;
    if fresh {
        let metric = if memory::is_active() {
            memory::METRIC_NAME
        } else {
            "unavailable (tracking allocator not installed)"
        };
        writeln!(file, "# peak_memory_bytes: {metric}")?;
    }
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    if fresh {
        w.write_record(CSV_HEADER)?;
    }
    for r in &report.rows {
        let ok = r.error.is_none();
        let m = |v: String| if ok { v } else { String::new() };
        w.write_record([
            r.dataset_label.clone(),
            r.n_transactions.to_string(),
            r.input_bytes.to_string(),
            r.algorithm.as_str().to_owned(),
            m(format!("{:.3}", r.wall_time_ms)),
            m(r.peak_memory_bytes.to_string()),
            m(r.n_patterns.to_string()),
            m(r.n_rules.to_string()),
            m(r.counters.db_scans.to_string()),
            m(r.counters.dfs_calls.to_string()),
            m(r.counters.edge_visits.to_string()),
            m(r.counters.leaf_verifications.to_string()),
        ])?;
    }
    w.flush()
}

/// Writes the differential findings as TSV: `dataset_label`, `kind`,
/// `items` (comma-joined), `count`.
pub fn write_discrepancies<W: Write>(mut out: W, discrepancies: &[Discrepancy]) -> io::Result<()> {
    writeln!(out, "dataset_label\tkind\titems\tcount")?;
    for d in discrepancies {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            d.dataset_label,
            d.kind.as_str(),
            d.items.join(","),
            d.count
        )?;
    }
    Ok(())
}
