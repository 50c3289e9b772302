//! Pattern and rule files (TSV or JSON).

use std::io::{self, Write};

use agraph_core::{Dataset, Fraction, PatternSet, Rule};
use serde::Serialize;

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Tab-separated with a header row.
    Tsv,
    /// A JSON array of objects.
    Json,
}

#[derive(Serialize)]
struct PatternRecord<'a> {
    items: Vec<&'a str>,
    count: u32,
    support: f64,
}

#[derive(Serialize)]
struct RuleRecord<'a> {
    antecedent: Vec<&'a str>,
    consequent: Vec<&'a str>,
    joint_count: u32,
    confidence: f64,
}

fn fixed4(f: Fraction) -> String {
    f.display_fixed(4).to_string()
}

fn support_of(count: u32, n: usize) -> Fraction {
    Fraction::new(count as u64, n.max(1) as u64).expect("non-zero denominator")
}

/// Writes `items`, `count`, `support` (4 decimals) per pattern.
pub fn write_patterns<W: Write>(
    mut out: W,
    dataset: &Dataset,
    patterns: &PatternSet,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Tsv => {
            writeln!(out, "items\tcount\tsupport")?;
            for p in &patterns.patterns {
                writeln!(
                    out,
                    "{}\t{}\t{}",
                    dataset.tokens_of(p.items()).join(","),
                    p.count(),
                    fixed4(support_of(p.count(), dataset.len()))
                )?;
            }
        }
        Format::Json => {
            let records: Vec<PatternRecord> = patterns
                .patterns
                .iter()
                .map(|p| PatternRecord {
                    items: dataset.tokens_of(p.items()),
                    count: p.count(),
                    support: rounded(support_of(p.count(), dataset.len())),
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &records)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Writes `antecedent`, `consequent`, `joint_count`, `confidence`
/// (4 decimals) per rule.
pub fn write_rules<W: Write>(
    mut out: W,
    dataset: &Dataset,
    rules: &[Rule],
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Tsv => {
            writeln!(out, "antecedent\tconsequent\tjoint_count\tconfidence")?;
            for r in rules {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    dataset.tokens_of(&r.antecedent).join(","),
                    dataset.tokens_of(&r.consequent).join(","),
                    r.joint_count,
                    fixed4(r.confidence())
                )?;
            }
        }
        Format::Json => {
            let records: Vec<RuleRecord> = rules
                .iter()
                .map(|r| RuleRecord {
                    antecedent: dataset.tokens_of(&r.antecedent),
                    consequent: dataset.tokens_of(&r.consequent),
                    joint_count: r.joint_count,
                    confidence: rounded(r.confidence()),
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &records)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn rounded(f: Fraction) -> f64 {
    fixed4(f).parse().expect("fixed-point string is a float")
}
