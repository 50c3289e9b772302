//! The `agraph` command line.
//!
//! Exit statuses: 0 success, 1 data-quality or benchmark failure, 2 usage or
//! contract error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use agraph_core::{load_baskets, Algorithm, Fraction, SupportThreshold, Thresholds, VertexOrder};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{append_report_csv, run_benchmark, write_discrepancies, BenchInput};
use crate::output::{write_patterns, write_rules, Format};
use crate::pipeline::run_pipeline;
use crate::synth::{generate_synthetic, SyntheticSpec};
use crate::weblog::{
    open_log, preprocess, sessions_to_baskets, PreprocessOptions, DEFAULT_BLOCKED_SUFFIXES,
};

/// Success.
pub const EXIT_OK: u8 = 0;
/// Data-quality or benchmark failure.
pub const EXIT_DATA: u8 = 1;
/// Usage, IO or contract error.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "agraph",
    version,
    about = "Frequent pattern and association rule mining"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Turn a Common Log Format access log into a basket file of sessions.
    Preprocess(PreprocessArgs),
    /// Mine patterns and rules from a basket file.
    Mine(MineArgs),
    /// Compare the miners' time and memory.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// Access log, plain or gzip.
    #[arg(long = "in")]
    input: PathBuf,
    /// Basket file to write.
    #[arg(long)]
    out: PathBuf,
    /// Stats sidecar (JSON); defaults to `<out>.stats.json`.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Idle minutes that end a session.
    #[arg(long, default_value_t = 30)]
    session_gap_min: i64,
    /// Path suffix to drop (repeatable); replaces the default list.
    #[arg(long = "block-suffix")]
    block_suffix: Vec<String>,
    /// Remove query strings from paths.
    #[arg(long)]
    strip_query: bool,
}

#[derive(Debug, Args)]
#[group(id = "support", required = true, multiple = false)]
struct SupportArgs {
    /// Minimum support as a fraction in (0, 1].
    #[arg(long, group = "support")]
    min_support: Option<String>,
    /// Minimum support as a transaction count.
    #[arg(long, group = "support")]
    min_support_count: Option<u32>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[command(flatten)]
    support: SupportArgs,
    /// Minimum rule confidence in [0, 1].
    #[arg(long, default_value = "0.6")]
    min_confidence: String,
}

impl ThresholdArgs {
    fn resolve(&self) -> Result<Thresholds, String> {
        let support = match (&self.support.min_support, self.support.min_support_count) {
            (Some(f), None) => SupportThreshold::Fraction(
                Fraction::parse_decimal(f).map_err(|e| format!("--min-support {f}: {e}"))?,
            ),
            (None, Some(c)) => SupportThreshold::Count(c),
            _ => return Err("give exactly one of --min-support / --min-support-count".into()),
        };
        let conf = Fraction::parse_decimal(&self.min_confidence)
            .map_err(|e| format!("--min-confidence {}: {e}", self.min_confidence))?;
        Thresholds::new(support, conf).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Apriori,
    Graph,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Apriori => Algorithm::Apriori,
            AlgorithmArg::Graph => Algorithm::Graph,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VertexOrderArg {
    /// First appearance in the basket file.
    FirstSeen,
    /// Most frequent first.
    Support,
}

#[derive(Debug, Args)]
struct MineArgs {
    /// Basket file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Mining algorithm.
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Output encoding.
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    /// Where to write patterns.
    #[arg(long)]
    patterns_out: PathBuf,
    /// Where to write rules.
    #[arg(long)]
    rules_out: PathBuf,
    /// Vertex order for the graph miner.
    #[arg(long, value_enum, default_value = "first-seen")]
    vertex_order: VertexOrderArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SynthSize {
    transactions: usize,
    items: usize,
}

fn parse_size(s: &str) -> Result<SynthSize, String> {
    let (n, k) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxK, got {s:?}"))?;
    Ok(SynthSize {
        transactions: n
            .parse()
            .map_err(|_| format!("bad transaction count {n:?}"))?,
        items: k.parse().map_err(|_| format!("bad item count {k:?}"))?,
    })
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = true)]
struct SourceArgs {
    /// Basket files (repeatable).
    #[arg(long = "in", group = "source")]
    input: Vec<PathBuf>,
    /// Synthetic dataset size as NxK (repeatable).
    #[arg(long, value_parser = parse_size, group = "source")]
    synthetic: Vec<SynthSize>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Mean transaction length for synthetic data.
    #[arg(long, default_value_t = 5.0)]
    mean_len: f64,
    /// Popularity power-law exponent for synthetic data.
    #[arg(long, default_value_t = 1.2)]
    skew: f64,
    /// Generator seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Report CSV (appended to).
    #[arg(long)]
    report: PathBuf,
    /// Differential findings TSV; defaults to `<report>.discrepancies.tsv`.
    #[arg(long)]
    discrepancy_out: Option<PathBuf>,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Algorithms to run, comma separated.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "apriori,graph"
    )]
    algorithms: Vec<AlgorithmArg>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Preprocess(a) => cmd_preprocess(&a),
        Command::Mine(a) => cmd_mine(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> Result<BufWriter<File>, u8> {
    File::create(path).map(BufWriter::new).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn cmd_preprocess(a: &PreprocessArgs) -> u8 {
    if a.session_gap_min < 0 {
        eprintln!("error: --session-gap-min must not be negative");
        return EXIT_USAGE;
    }
    let file = match File::open(&a.input) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", a.input.display());
            return EXIT_USAGE;
        }
    };
    let opts = PreprocessOptions {
        blocked_suffixes: if a.block_suffix.is_empty() {
            DEFAULT_BLOCKED_SUFFIXES
                .iter()
                .map(|s| s.to_string())
                .collect()
        } else {
            a.block_suffix.clone()
        },
        session_gap_secs: a.session_gap_min * 60,
        strip_query: a.strip_query,
    };
    let (sessions, mut stats) = match open_log(file).and_then(|r| preprocess(r, &opts)) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: reading {}: {e}", a.input.display());
            return EXIT_USAGE;
        }
    };
    let baskets = sessions_to_baskets(&sessions);
    stats.output_bytes = baskets.len() as u64;
    if let Err(e) = fs::write(&a.out, &baskets) {
        eprintln!("error: cannot write {}: {e}", a.out.display());
        return EXIT_USAGE;
    }
    let stats_path = a
        .stats
        .clone()
        .unwrap_or_else(|| with_suffix(&a.out, ".stats.json"));
    let json = serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n";
    if let Err(e) = fs::write(&stats_path, json) {
        eprintln!("error: cannot write {}: {e}", stats_path.display());
        return EXIT_USAGE;
    }
    eprintln!(
        "lines={} parse_errors={} kept={} sessions={} bytes_in={} bytes_out={}",
        stats.lines_read,
        stats.parse_errors,
        stats.records_kept,
        stats.sessions_emitted,
        stats.input_bytes,
        stats.output_bytes
    );
    if stats.mostly_unparseable() {
        eprintln!("error: more than half of the lines failed to parse; is this Common Log Format?");
        return EXIT_DATA;
    }
    EXIT_OK
}

fn cmd_mine(a: &MineArgs) -> u8 {
    let thresholds = match a.thresholds.resolve() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let bytes = match fs::read(&a.input) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", a.input.display());
            return EXIT_USAGE;
        }
    };
    let loaded = match load_baskets(&bytes) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {}: {e}", a.input.display());
            return EXIT_USAGE;
        }
    };
    for line in &loaded.skipped_lines {
        eprintln!("warning: {}:{line}: no items, skipped", a.input.display());
    }
    let ds = loaded.dataset;
    let order = match a.vertex_order {
        VertexOrderArg::FirstSeen => VertexOrder::FirstAppearance,
        VertexOrderArg::Support => VertexOrder::SupportDescending,
    };
    let out = match run_pipeline(&ds, &thresholds, a.algorithm.into(), &order) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };

    let written = create(&a.patterns_out).and_then(|mut w| {
        write_patterns(&mut w, &ds, &out.patterns, a.format)
            .and_then(|_| w.flush())
            .map_err(|e| {
                eprintln!("error: writing {}: {e}", a.patterns_out.display());
                EXIT_USAGE
            })
    });
    if let Err(code) = written {
        return code;
    }
    let written = create(&a.rules_out).and_then(|mut w| {
        write_rules(&mut w, &ds, &out.rules, a.format)
            .and_then(|_| w.flush())
            .map_err(|e| {
                eprintln!("error: writing {}: {e}", a.rules_out.display());
                EXIT_USAGE
            })
    });
    if let Err(code) = written {
        return code;
    }

    let c = out.patterns.counters;
    eprintln!(
        "algorithm={} n={} min_support_count={} frequent_items={} patterns={} rules={} \
         db_scans={} dfs_calls={} edge_visits={} leaf_verifications={}",
        out.patterns.algorithm.as_str(),
        ds.len(),
        out.min_support_count,
        out.n_frequent_items,
        out.patterns.len(),
        out.rules.len(),
        c.db_scans,
        c.dfs_calls,
        c.edge_visits,
        c.leaf_verifications
    );
    EXIT_OK
}

fn cmd_bench(a: &BenchArgs) -> u8 {
    let thresholds = match a.thresholds.resolve() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut inputs = Vec::new();
    for path in &a.source.input {
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return EXIT_USAGE;
            }
        };
        match load_baskets(&bytes) {
            Ok(l) => inputs.push(BenchInput {
                label: path.display().to_string(),
                dataset: l.dataset,
                input_bytes: bytes.len() as u64,
            }),
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
    }
    for size in &a.source.synthetic {
        let spec = SyntheticSpec {
            n_transactions: size.transactions,
            n_items: size.items,
            mean_length: a.mean_len,
            skew: a.skew,
            seed: a.seed,
        };
        match generate_synthetic(&spec) {
            Ok(ds) => inputs.push(BenchInput::new(
                format!(
                    "synthetic-{}x{}-seed{}",
                    size.transactions, size.items, a.seed
                ),
                ds,
            )),
            Err(e) => {
                eprintln!("error: synthetic {}x{}: {e}", size.transactions, size.items);
                return EXIT_USAGE;
            }
        }
    }
    let algorithms: Vec<Algorithm> = a.algorithms.iter().map(|&x| x.into()).collect();
    let report = run_benchmark(&inputs, &thresholds, &algorithms);

    if let Err(e) = append_report_csv(&a.report, &report) {
        eprintln!("error: cannot write {}: {e}", a.report.display());
        return EXIT_USAGE;
    }
    let disc_path = a
        .discrepancy_out
        .clone()
        .unwrap_or_else(|| with_suffix(&a.report, ".discrepancies.tsv"));
    let written = create(&disc_path).and_then(|mut w| {
        write_discrepancies(&mut w, &report.discrepancies)
            .and_then(|_| w.flush())
            .map_err(|_| EXIT_USAGE)
    });
    if let Err(code) = written {
        return code;
    }

    for r in &report.rows {
        match &r.error {
            None => eprintln!(
                "{} {}: {:.3} ms, {} bytes peak, {} patterns, {} rules",
                r.dataset_label,
                r.algorithm.as_str(),
                r.wall_time_ms,
                r.peak_memory_bytes,
                r.n_patterns,
                r.n_rules
            ),
            Some(e) => eprintln!("{} {}: FAILED: {e}", r.dataset_label, r.algorithm.as_str()),
        }
    }
    if report.failures().next().is_some() {
        return EXIT_DATA;
    }
    EXIT_OK
}
