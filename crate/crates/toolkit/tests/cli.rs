use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flate2::write::GzEncoder;
use flate2::Compression;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn agraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agraph"))
        .args(args)
        .output()
        .expect("spawn agraph")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Mined {
    patterns: String,
    rules: String,
    status: i32,
}

fn mine(dir: &TempDir, input: &Path, extra: &[&str]) -> Mined {
    let pat = dir.path().join("patterns");
    let rul = dir.path().join("rules");
    let mut args = vec![
        "mine",
        "--in",
        p(input),
        "--patterns-out",
        p(&pat),
        "--rules-out",
        p(&rul),
    ];
    args.extend_from_slice(extra);
    let out = agraph(&args);
    Mined {
        status: code(&out),
        patterns: fs::read_to_string(&pat).unwrap_or_default(),
        rules: fs::read_to_string(&rul).unwrap_or_default(),
    }
}

const SUGAR_RULES: [&str; 3] = [
    "Milk,Sugar\tButter\t2\t1.0000",
    "Butter,Sugar\tMilk\t2\t1.0000",
    "Sugar\tMilk,Butter\t2\t1.0000",
];

#[test]
fn graph_mine_on_market_baskets() {
    let dir = TempDir::new().unwrap();
    let m = mine(
        &dir,
        &fixture("market.baskets"),
        &[
            "--algorithm",
            "graph",
            "--min-support",
            "0.2",
            "--min-confidence",
            "0.6",
        ],
    );
    assert_eq!(m.status, 0);
    assert_eq!(
        m.patterns,
        "items\tcount\tsupport\n\
         Milk,Butter,Sugar\t2\t0.2222\n\
         Milk,Butter,Bread\t2\t0.2222\n\
         Butter,Beer\t2\t0.2222\n"
    );
    let lines: Vec<&str> = m.rules.lines().collect();
    for rule in SUGAR_RULES {
        assert!(lines.contains(&rule), "missing {rule:?} in\n{}", m.rules);
    }
}

#[test]
fn apriori_mine_includes_the_same_rules() {
    let dir = TempDir::new().unwrap();
    let m = mine(
        &dir,
        &fixture("market.baskets"),
        &[
            "--algorithm",
            "apriori",
            "--min-support-count",
            "2",
            "--min-confidence",
            "0.6",
        ],
    );
    assert_eq!(m.status, 0);
    let lines: Vec<&str> = m.rules.lines().collect();
    for rule in SUGAR_RULES {
        assert!(lines.contains(&rule));
    }
}

#[test]
fn json_output_parses() {
    let dir = TempDir::new().unwrap();
    let m = mine(
        &dir,
        &fixture("market.baskets"),
        &[
            "--algorithm",
            "graph",
            "--min-support",
            "0.2",
            "--format",
            "json",
        ],
    );
    assert_eq!(m.status, 0);
    let v: serde_json::Value = serde_json::from_str(&m.patterns).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[2]["items"], serde_json::json!(["Butter", "Beer"]));
    let r: serde_json::Value = serde_json::from_str(&m.rules).unwrap();
    assert!(r.as_array().unwrap().iter().all(|x| x["confidence"] == 1.0));
}

#[test]
fn mining_is_deterministic() {
    let first = TempDir::new().unwrap();
    let second = TempDir::new().unwrap();
    for algo in ["graph", "apriori"] {
        let args = ["--algorithm", algo, "--min-support", "0.2"];
        let a = mine(&first, &fixture("market.baskets"), &args);
        let b = mine(&second, &fixture("market.baskets"), &args);
        assert_eq!((a.patterns, a.rules), (b.patterns, b.rules));
    }
}

#[test]
fn vertex_order_does_not_change_patterns() {
    let dir = TempDir::new().unwrap();
    let first = mine(
        &dir,
        &fixture("market.baskets"),
        &["--algorithm", "graph", "--min-support", "0.2"],
    );
    let support = mine(
        &dir,
        &fixture("market.baskets"),
        &[
            "--algorithm",
            "graph",
            "--min-support",
            "0.2",
            "--vertex-order",
            "support",
        ],
    );
    let sorted = |s: &str| {
        let mut v: Vec<Vec<String>> = s
            .lines()
            .skip(1)
            .map(|l| {
                let (items, rest) = l.split_once('\t').unwrap();
                let mut items: Vec<String> = items.split(',').map(str::to_owned).collect();
                items.sort();
                items.push(rest.to_owned());
                items
            })
            .collect();
        v.sort();
        v
    };
    assert_eq!(sorted(&first.patterns), sorted(&support.patterns));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let input = fixture("market.baskets");
    for extra in [
        &["--algorithm", "graph", "--min-support", "0"][..],
        &["--algorithm", "graph", "--min-support", "1.5"],
        &["--algorithm", "graph", "--min-support-count", "0"],
        &[
            "--algorithm",
            "graph",
            "--min-support",
            "0.2",
            "--min-confidence",
            "2",
        ],
        &["--algorithm", "graph"],
        &["--algorithm", "fpgrowth", "--min-support", "0.2"],
        &[
            "--algorithm",
            "graph",
            "--min-support",
            "0.2",
            "--min-support-count",
            "2",
        ],
    ] {
        assert_eq!(mine(&dir, &input, extra).status, 2, "{extra:?}");
    }
    let missing = dir.path().join("nope");
    assert_eq!(
        mine(
            &dir,
            &missing,
            &["--algorithm", "graph", "--min-support", "0.2"]
        )
        .status,
        2
    );
    assert_eq!(code(&agraph(&[])), 2);
    assert_eq!(code(&agraph(&["--help"])), 0);
}

#[test]
fn invalid_utf8_is_rejected() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.baskets");
    fs::write(&input, b"a b\nc \xff\n").unwrap();
    let m = mine(
        &dir,
        &input,
        &["--algorithm", "graph", "--min-support", "0.5"],
    );
    assert_eq!(m.status, 2);
}

#[test]
fn empty_input_is_not_an_error() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("empty.baskets");
    fs::write(&input, "# nothing\n\n").unwrap();
    for algo in ["graph", "apriori"] {
        let m = mine(&dir, &input, &["--algorithm", algo, "--min-support", "0.5"]);
        assert_eq!(m.status, 0);
        assert_eq!(m.patterns, "items\tcount\tsupport\n");
        assert_eq!(m.rules, "antecedent\tconsequent\tjoint_count\tconfidence\n");
    }
}

#[test]
fn preprocess_plain_and_gzip() {
    let dir = TempDir::new().unwrap();
    let log = fs::read(fixture("access.log")).unwrap();
    let gz = dir.path().join("access.log.gz");
    let mut enc = GzEncoder::new(Vec::new(), Compression::default());
    enc.write_all(&log).unwrap();
    fs::write(&gz, enc.finish().unwrap()).unwrap();
    let expected = fs::read_to_string(fixture("access.baskets")).unwrap();

    for input in [fixture("access.log"), gz] {
        let out = dir.path().join("sessions.baskets");
        let run = agraph(&["preprocess", "--in", p(&input), "--out", p(&out)]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
        assert_eq!(fs::read_to_string(&out).unwrap(), expected);
        let stats: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join("sessions.baskets.stats.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(stats["lines_read"], 12);
        assert_eq!(stats["parse_errors"], 0);
        assert_eq!(stats["records_kept"], 8);
        assert_eq!(stats["sessions_emitted"], 4);
    }
}

#[test]
fn preprocess_rejects_non_clf() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("junk.log");
    fs::write(
        &input,
        "hello\nworld\nh1 - - [01/Jul/1995:00:00:00 -0400] \"GET / HTTP/1.0\" 200 1\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let stats = dir.path().join("s.json");
    let run = agraph(&[
        "preprocess",
        "--in",
        p(&input),
        "--out",
        p(&out),
        "--stats",
        p(&stats),
    ]);
    assert_eq!(code(&run), 1);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(s["parse_errors"], 2);
}

#[test]
fn preprocess_gap_and_blocklist_flags() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let run = agraph(&[
        "preprocess",
        "--in",
        p(&fixture("access.log")),
        "--out",
        p(&out),
        "--session-gap-min",
        "60",
        "--block-suffix",
        ".html",
    ]);
    assert_eq!(code(&run), 0);
    // h1 stays one session; .gif and .XBM are no longer blocked
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "/images/logo.gif /shuttle/countdown/ /history/apollo/\n\
         /shuttle/countdown/ /icons/NASA-logosmall.XBM /history/apollo/\n"
    );
}

#[test]
fn bench_writes_report_and_discrepancies() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.csv");
    let market = fixture("market.baskets");
    let args = [
        "bench",
        "--in",
        p(&market),
        "--synthetic",
        "300x20",
        "--seed",
        "7",
        "--min-support",
        "0.05",
        "--min-confidence",
        "0.5",
        "--report",
        p(&report),
    ];
    assert_eq!(code(&agraph(&args)), 0);
    assert_eq!(code(&agraph(&args)), 0);
    let text = fs::read_to_string(&report).unwrap();
    let header = "dataset_label,n_transactions,input_bytes,algorithm,wall_time_ms,\
                  peak_memory_bytes,n_patterns,n_rules,db_scans,dfs_calls,edge_visits,\
                  leaf_verifications";
    assert_eq!(text.lines().filter(|l| *l == header).count(), 1);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && *l != header)
        .collect();
    assert_eq!(rows.len(), 8);
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 12);
        if fields[3] == "graph" {
            assert_eq!(fields[8], "2");
        }
    }
    assert!(rows
        .iter()
        .any(|r| r.starts_with("synthetic-300x20-seed7,300,")));
    let disc = fs::read_to_string(dir.path().join("report.csv.discrepancies.tsv")).unwrap();
    assert!(disc.lines().skip(1).all(|l| l.contains("\tmissed\t")));
}

#[test]
fn bench_requires_a_source() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.csv");
    let run = agraph(&["bench", "--min-support", "0.1", "--report", p(&report)]);
    assert_eq!(code(&run), 2);
}
