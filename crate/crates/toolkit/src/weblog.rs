//! Access-log preprocessing: Common Log Format in, one transaction per
//! browsing session out.
//!
//! Stages: [`parse_log_line`] → [`clean`] (status 200 only, asset suffixes
//! dropped) → [`sessionize`] (per host, 30-minute idle timeout, refreshes and
//! repeats collapsed) → [`to_dataset`].

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, BufReader, Read};

use agraph_core::{Dataset, DatasetBuilder};
use chrono::DateTime;
use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

/// Suffixes removed by default. `.xmb` is kept next to `.xbm` on purpose.
pub const DEFAULT_BLOCKED_SUFFIXES: [&str; 4] = [".gif", ".xbm", ".xmb", ".ico"];

/// Default idle timeout between two hits of one session, in seconds.
pub const DEFAULT_SESSION_GAP_SECS: i64 = 30 * 60;

/// One parsed access-log line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRecord {
    /// Client host or address.
    pub host: String,
    /// Seconds since the Unix epoch, zone offset applied.
    pub timestamp: i64,
    /// HTTP method.
    pub method: String,
    /// Requested path, query string included.
    pub path: String,
    /// HTTP status, 100..=599.
    pub status: u16,
    /// Response size; `None` for `-`.
    pub bytes: Option<u64>,
}

/// A line that is not valid Common Log Format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// The offending line.
    pub line: String,
    /// What was wrong with it.
    pub reason: &'static str,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.reason, self.line)
    }
}

impl std::error::Error for ParseError {}

/// Parses `host ident authuser [dd/Mon/yyyy:HH:MM:SS zzzz] "METHOD path proto" status bytes`.
///
/// The protocol may be missing from the request; `bytes` of `-` is absent.
pub fn parse_log_line(line: &str) -> Result<LogRecord, ParseError> {
    let err = |reason| ParseError {
        line: line.to_owned(),
        reason,
    };
    let line = line.trim_end_matches(['\r', '\n']);

    let open = line.find('[').ok_or_else(|| err("missing '['"))?;
    let close = open + line[open..].find(']').ok_or_else(|| err("missing ']'"))?;
    let mut head = line[..open].split_whitespace();
    let host = head.next().ok_or_else(|| err("missing host"))?;
    if head.count() != 2 {
        return Err(err("expected ident and authuser before timestamp"));
    }

    let stamp = &line[open + 1..close];
    let timestamp = DateTime::parse_from_str(stamp, "%d/%b/%Y:%H:%M:%S %z")
        .map_err(|_| err("bad timestamp"))?
        .timestamp();

    let rest = line[close + 1..].trim_start();
    let rest = rest
        .strip_prefix('"')
        .ok_or_else(|| err("missing request quote"))?;
    let end_quote = rest.rfind('"').ok_or_else(|| err("unterminated request"))?;
    let request = &rest[..end_quote];
    let mut req = request.split_whitespace();
    let method = req.next().ok_or_else(|| err("empty request"))?;
    let path = req.next().ok_or_else(|| err("request has no path"))?;

    let mut tail = rest[end_quote + 1..].split_whitespace();
    let status: u16 = tail
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err("bad status"))?;
    if !(100..=599).contains(&status) {
        return Err(err("status out of range"));
    }
    let bytes = match tail.next() {
        Some("-") => None,
        Some(b) => Some(b.parse().map_err(|_| err("bad byte count"))?),
        None => return Err(err("missing byte count")),
    };
    if tail.next().is_some() {
        return Err(err("trailing fields"));
    }

    Ok(LogRecord {
        host: host.to_owned(),
        timestamp,
        method: method.to_owned(),
        path: path.to_owned(),
        status,
        bytes,
    })
}

/// Keeps successful (`200`) requests whose lowercased path ends with none of
/// `blocked_suffixes`.
pub fn clean<'a, I>(
    records: I,
    blocked_suffixes: &'a [String],
) -> impl Iterator<Item = LogRecord> + 'a
where
    I: IntoIterator<Item = LogRecord>,
    I::IntoIter: 'a,
{
    let lowered: Vec<String> = blocked_suffixes.iter().map(|s| s.to_lowercase()).collect();
    records.into_iter().filter(move |r| {
        if r.status != 200 {
            return false;
        }
        let path = r.path.to_lowercase();
        !lowered.iter().any(|s| path.ends_with(s.as_str()))
    })
}

/// Drops everything from the first `?`.
pub fn strip_query(mut record: LogRecord) -> LogRecord {
    if let Some(q) = record.path.find('?') {
        record.path.truncate(q);
    }
    record
}

/// One visit: a host's run of requests without an idle gap over the limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    /// Client host.
    pub host: String,
    /// First hit, epoch seconds.
    pub start: i64,
    /// Last hit, epoch seconds.
    pub end: i64,
    /// Distinct pages in first-visit order.
    pub pages: Vec<String>,
}

/// Splits each host's requests into sessions. Hits more than `gap_secs`
/// apart start a new session; a gap of exactly `gap_secs` does not.
///
/// Input need not be sorted; each host's hits are stable-sorted by time.
/// Output is ordered by host, then start time.
pub fn sessionize<I>(records: I, gap_secs: i64) -> Vec<Session>
where
    I: IntoIterator<Item = LogRecord>,
{
    let mut pages: HashMap<String, u32> = HashMap::new();
    let mut page_names: Vec<String> = Vec::new();
    let mut by_host: HashMap<String, Vec<(i64, u32)>> = HashMap::new();
    for r in records {
        let next = page_names.len() as u32;
        let page = *pages.entry(r.path).or_insert_with_key(|k| {
            page_names.push(k.clone());
            next
        });
        by_host.entry(r.host).or_default().push((r.timestamp, page));
    }

    let mut hosts: Vec<(String, Vec<(i64, u32)>)> = by_host.into_iter().collect();
    hosts.sort_by(|a, b| a.0.cmp(&b.0));

    let mut sessions = Vec::new();
    for (host, mut hits) in hosts {
        hits.sort_by_key(|&(t, _)| t);
        let mut current: Option<(i64, i64, Vec<u32>)> = None;
        for (t, page) in hits {
            match &mut current {
                Some((_, end, seen)) if t - *end <= gap_secs => {
                    *end = t;
                    if !seen.contains(&page) {
                        seen.push(page);
                    }
                }
                _ => {
                    if let Some(done) = current.take() {
                        sessions.push(finish(&host, done, &page_names));
                    }
                    current = Some((t, t, vec![page]));
                }
            }
        }
        if let Some(done) = current {
            sessions.push(finish(&host, done, &page_names));
        }
    }
    sessions
}

fn finish(host: &str, (start, end, seen): (i64, i64, Vec<u32>), names: &[String]) -> Session {
    Session {
        host: host.to_owned(),
        start,
        end,
        pages: seen
            .into_iter()
            .map(|p| names[p as usize].clone())
            .collect(),
    }
}

/// One transaction per session, items are the raw paths.
pub fn to_dataset(sessions: &[Session]) -> Dataset {
    let mut builder = DatasetBuilder::new();
    for s in sessions {
        builder.push_row(s.pages.iter());
    }
    builder.finish()
}

/// Basket-file text for sessions: one line per session, pages in visit order.
pub fn sessions_to_baskets(sessions: &[Session]) -> String {
    let mut out = String::new();
    for s in sessions {
        out.push_str(&s.pages.join(" "));
        out.push('\n');
    }
    out
}

/// Preprocessing knobs.
#[derive(Debug, Clone)]
pub struct PreprocessOptions {
    /// Lowercase path suffixes to drop.
    pub blocked_suffixes: Vec<String>,
    /// Idle timeout in seconds.
    pub session_gap_secs: i64,
    /// Remove query strings before filtering.
    pub strip_query: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            blocked_suffixes: DEFAULT_BLOCKED_SUFFIXES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            session_gap_secs: DEFAULT_SESSION_GAP_SECS,
            strip_query: false,
        }
    }
}

/// Counters written to the stats sidecar.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessStats {
    /// Non-blank input lines.
    pub lines_read: u64,
    /// Lines that failed to parse.
    pub parse_errors: u64,
    /// Records left after cleaning.
    pub records_kept: u64,
    /// Sessions written.
    pub sessions_emitted: u64,
    /// Bytes of (decompressed) log input.
    pub input_bytes: u64,
    /// Bytes of basket output.
    pub output_bytes: u64,
}

impl PreprocessStats {
    /// More than half of the lines failed to parse.
    pub fn mostly_unparseable(&self) -> bool {
        self.parse_errors * 2 > self.lines_read
    }
}

/// Runs the whole pipeline over a log stream. Invalid UTF-8 is replaced
/// rather than rejected; such lines normally fail to parse.
pub fn preprocess<R: BufRead>(
    mut input: R,
    opts: &PreprocessOptions,
) -> io::Result<(Vec<Session>, PreprocessStats)> {
    let mut stats = PreprocessStats::default();
    let mut records = Vec::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = input.read_until(b'\n', &mut buf)?;
        if n == 0 {
            break;
        }
        stats.input_bytes += n as u64;
        let line = String::from_utf8_lossy(&buf);
        if line.trim().is_empty() {
            continue;
        }
        stats.lines_read += 1;
        match parse_log_line(&line) {
            Ok(r) => records.push(if opts.strip_query { strip_query(r) } else { r }),
            Err(_) => stats.parse_errors += 1,
        }
    }
    let kept: Vec<LogRecord> = clean(records, &opts.blocked_suffixes).collect();
    stats.records_kept = kept.len() as u64;
    let sessions = sessionize(kept, opts.session_gap_secs);
    stats.sessions_emitted = sessions.len() as u64;
    Ok((sessions, stats))
}

/// Wraps a reader, transparently gunzipping when it starts with the gzip
/// magic bytes.
pub fn open_log<R: Read + 'static>(reader: R) -> io::Result<Box<dyn BufRead>> {
    let mut buffered = BufReader::new(reader);
    let head = buffered.fill_buf()?;
    if head.len() >= 2 && head[0] == 0x1f && head[1] == 0x8b {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(buffered))))
    } else {
        Ok(Box::new(buffered))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(host: &str, t: i64, path: &str, status: u16) -> LogRecord {
        LogRecord {
            host: host.into(),
            timestamp: t,
            method: "GET".into(),
            path: path.into(),
            status,
            bytes: Some(1),
        }
    }

    fn defaults() -> Vec<String> {
        PreprocessOptions::default().blocked_suffixes
    }

    #[test]
    fn parses_nasa_line() {
        let r = parse_log_line(
            r#"h1 - - [01/Jul/1995:00:00:01 -0400] "GET /history/apollo/ HTTP/1.0" 200 6245"#,
        )
        .unwrap();
        assert_eq!(r.host, "h1");
        assert_eq!(r.path, "/history/apollo/");
        assert_eq!(r.method, "GET");
        assert_eq!(r.status, 200);
        assert_eq!(r.bytes, Some(6245));
        // 1995-07-01T04:00:01Z
        assert_eq!(r.timestamp, 804_571_201);
    }

    #[test]
    fn parses_missing_protocol_and_dash_bytes() {
        let r =
            parse_log_line(r#"h2 - - [01/Jul/1995:00:00:02 +0000] "GET /a.html" 304 -"#).unwrap();
        assert_eq!(r.path, "/a.html");
        assert_eq!(r.bytes, None);
        assert_eq!(r.status, 304);
    }

    #[test]
    fn rejects_garbage() {
        for line in [
            "garbage line",
            r#"h - - [01/Jul/1995:00:00:02 +0000 "GET / HTTP/1.0" 200 1"#,
            r#"h - - [01/Jul/1995:00:00:02 +0000] "GET / HTTP/1.0 200 1"#,
            r#"h - - [01/Jul/1995:00:00:02 +0000] "GET / HTTP/1.0" 999 1"#,
            r#"h - - [01/Jul/1995:00:00:02 +0000] "GET / HTTP/1.0" 200 x"#,
            r#"h - - [31/Foo/1995:00:00:02 +0000] "GET / HTTP/1.0" 200 1"#,
            r#"h - - [01/Jul/1995:00:00:02 +0000] "" 200 1"#,
        ] {
            assert!(parse_log_line(line).is_err(), "{line}");
        }
    }

    #[test]
    fn zone_offsets_give_absolute_time() {
        let a =
            parse_log_line(r#"h - - [01/Jul/1995:00:00:00 -0400] "GET / HTTP/1.0" 200 1"#).unwrap();
        let b =
            parse_log_line(r#"h - - [01/Jul/1995:04:00:00 +0000] "GET / HTTP/1.0" 200 1"#).unwrap();
        assert_eq!(a.timestamp, b.timestamp);
    }

    #[test]
    fn clean_filters_status_and_suffix() {
        let blocked = defaults();
        let kept: Vec<_> = clean(
            vec![
                rec("h", 0, "/a", 404),
                rec("h", 0, "/logo.GIF", 200),
                rec("h", 0, "/x.xbm", 200),
                rec("h", 0, "/shuttle/countdown/", 200),
            ],
            &blocked,
        )
        .collect();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].path, "/shuttle/countdown/");
    }

    #[test]
    fn idle_timeout_splits() {
        let s = sessionize(
            vec![
                rec("h", 0, "/a", 200),
                rec("h", 29 * 60, "/b", 200),
                rec("h", 65 * 60, "/c", 200),
            ],
            DEFAULT_SESSION_GAP_SECS,
        );
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].pages, ["/a", "/b"]);
        assert_eq!(s[1].pages, ["/c"]);
    }

    #[test]
    fn exact_gap_stays_in_session() {
        let gap = DEFAULT_SESSION_GAP_SECS;
        let s = sessionize(vec![rec("h", 0, "/a", 200), rec("h", gap, "/b", 200)], gap);
        assert_eq!(s.len(), 1);
        let s = sessionize(
            vec![rec("h", 0, "/a", 200), rec("h", gap + 1, "/b", 200)],
            gap,
        );
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn refresh_collapses() {
        let s = sessionize(
            vec![
                rec("h", 0, "/a", 200),
                rec("h", 1, "/a", 200),
                rec("h", 2, "/b", 200),
                rec("h", 3, "/a", 200),
            ],
            DEFAULT_SESSION_GAP_SECS,
        );
        assert_eq!(s[0].pages, ["/a", "/b"]);
    }

    #[test]
    fn hosts_are_independent_and_sorted() {
        let s = sessionize(
            vec![
                rec("z", 10, "/a", 200),
                rec("b", 20, "/b", 200),
                rec("z", 5, "/c", 200),
                rec("b", 3000, "/d", 200),
            ],
            DEFAULT_SESSION_GAP_SECS,
        );
        let got: Vec<(&str, Vec<&str>)> = s
            .iter()
            .map(|s| {
                (
                    s.host.as_str(),
                    s.pages.iter().map(String::as_str).collect(),
                )
            })
            .collect();
        assert_eq!(
            got,
            vec![
                ("b", vec!["/b"]),
                ("b", vec!["/d"]),
                ("z", vec!["/c", "/a"])
            ]
        );
    }

    #[test]
    fn dataset_from_sessions() {
        let mk = |pages: &[&str]| Session {
            host: "h".into(),
            start: 0,
            end: 0,
            pages: pages.iter().map(|s| s.to_string()).collect(),
        };
        let ds = to_dataset(&[mk(&["/a", "/b"])]);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.transactions()[0].items().len(), 2);
        assert_eq!(to_dataset(&[mk(&["/a", "/b"]), mk(&["/a"])]).len(), 2);
        assert_eq!(to_dataset(&[]).len(), 0);
    }

    #[test]
    fn strip_query_truncates() {
        assert_eq!(strip_query(rec("h", 0, "/a?b=1", 200)).path, "/a");
        assert_eq!(strip_query(rec("h", 0, "/a", 200)).path, "/a");
    }

    #[test]
    fn gzip_input_is_detected() {
        use flate2::{write::GzEncoder, Compression};
        use std::io::Write;
        let text = "h - - [01/Jul/1995:00:00:01 -0400] \"GET /a HTTP/1.0\" 200 1\n";
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(text.as_bytes()).unwrap();
        let gz = enc.finish().unwrap();
        let (sessions, stats) = preprocess(
            open_log(io::Cursor::new(gz)).unwrap(),
            &PreprocessOptions::default(),
        )
        .unwrap();
        assert_eq!(stats.lines_read, 1);
        assert_eq!(sessions.len(), 1);
        let (_, plain) = preprocess(
            open_log(io::Cursor::new(text.as_bytes().to_vec())).unwrap(),
            &PreprocessOptions::default(),
        )
        .unwrap();
        assert_eq!(plain.records_kept, 1);
    }
}
