//! Append-only audit journal and its read paths.
//!
//! Every durable write lands one JSON object on one line of
//! `.resilient_write/journal.jsonl`, keys sorted, LF-terminated. Rows hold
//! metadata only; file content is never duplicated into the log. Appends
//! rely on O_APPEND semantics so a whole line is never interleaved with
//! another writer's. Reads are linear scans; at the journal sizes this
//! server produces, an index would be dead weight.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::envelope::{ErrorKind, Failure, ReasonHint};

pub const JOURNAL_RELATIVE_PATH: &str = ".resilient_write/journal.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Write,
    Chunk,
    Compose,
    Scratch,
    Handoff,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalRow {
    pub ts: String,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    pub mode: String,
    pub caller: String,
    pub seq: u64,
    pub kind: RowKind,
    /// Chunk-session linkage for kind `chunk` / `compose` rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
    /// Human-readable note for kind `warning` rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Everything the caller provides; timestamp, sequence number, and caller
/// identity are filled in by [`Journal::append`].
#[derive(Debug, Clone)]
pub struct NewRow {
    pub kind: RowKind,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    pub mode: String,
    pub session: Option<String>,
    pub detail: Option<String>,
}

#[derive(Debug)]
pub struct Journal {
    file_path: PathBuf,
    next_seq: u64,
}

impl Journal {
    /// Open (or lazily create) the journal under a workspace root. The next
    /// sequence number is derived by counting existing lines; there is no
    /// separate counter file to drift out of sync.
    pub fn open(workspace_root: &Path) -> std::io::Result<Journal> {
        let file_path = workspace_root.join(JOURNAL_RELATIVE_PATH);
        let mut existing_lines = 0u64;
        if file_path.exists() {
            let bytes = std::fs::read(&file_path)?;
            if !bytes.is_empty() {
                existing_lines = bytes.iter().filter(|&&b| b == b'\n').count() as u64;
                if *bytes.last().unwrap() != b'\n' {
                    // A crash mid-append left a partial line; terminate it so
                    // the next append starts clean. The partial line is
                    // skipped (with a warning) on read.
                    let mut f = std::fs::OpenOptions::new().append(true).open(&file_path)?;
                    f.write_all(b"\n")?;
                    existing_lines += 1;
                }
            }
        }
        Ok(Journal {
            file_path,
            next_seq: existing_lines + 1,
        })
    }

    pub fn file_path(&self) -> &Path {
        &self.file_path
    }

    pub fn append(&mut self, row: NewRow, caller: &str) -> Result<u64, Failure> {
        let seq = self.next_seq;
        let full = JournalRow {
            ts: now_iso_millis(),
            path: row.path,
            sha256: row.sha256,
            bytes: row.bytes,
            mode: row.mode,
            caller: caller.to_string(),
            seq,
            kind: row.kind,
            session: row.session,
            detail: row.detail,
        };
        let value = serde_json::to_value(&full).expect("journal row serialises");
        append_jsonl_line(&self.file_path, &value)?;
        self.next_seq += 1;
        Ok(seq)
    }

    /// Last `n` rows in chronological order. Corrupt lines are skipped and
    /// reported as warnings, never as failures.
    pub fn tail(&self, n: usize) -> (Vec<JournalRow>, Vec<String>) {
        let (rows, warnings) = self.read_all();
        let start = rows.len().saturating_sub(n);
        (rows[start..].to_vec(), warnings)
    }

    pub fn analytics(&self) -> AnalyticsReport {
        let (rows, _) = self.read_all();
        analyze(&rows)
    }

    pub fn read_all(&self) -> (Vec<JournalRow>, Vec<String>) {
        let mut rows = Vec::new();
        let mut warnings = Vec::new();
        let text = match std::fs::read_to_string(&self.file_path) {
            Ok(text) => text,
            Err(_) => return (rows, warnings),
        };
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<JournalRow>(line) {
                Ok(row) => rows.push(row),
                Err(e) => warnings.push(format!("journal line {} skipped: {}", i + 1, e)),
            }
        }
        (rows, warnings)
    }
}

/// Append one sorted-key JSON object as a single line, using a single
/// O_APPEND write so concurrent processes cannot interleave partial lines.
pub fn append_jsonl_line(path: &Path, value: &Value) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io_failure)?;
    }
    let mut line = serde_json::to_string(value).expect("json value serialises");
    line.push('\n');
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io_failure)?;
    file.write_all(line.as_bytes()).map_err(io_failure)?;
    Ok(())
}

fn io_failure(e: std::io::Error) -> Failure {
    if is_disk_full(&e) {
        Failure::new(ErrorKind::QuotaExceeded, ReasonHint::SizeLimit)
            .with_context("detail", Value::String(format!("journal append failed: {e}")))
    } else {
        Failure::policy(ReasonHint::Permission, &format!("journal append failed: {e}"))
    }
}

pub fn is_disk_full(e: &std::io::Error) -> bool {
    e.raw_os_error() == Some(libc_enospc())
}

const fn libc_enospc() -> i32 {
    28 // ENOSPC on Linux and macOS
}

pub fn now_iso_millis() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

// ---------------------------------------------------------------------------
// Analytics

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChunkSessionSummary {
    pub session: String,
    pub chunks: u64,
    pub composed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Span {
    pub first_ts: String,
    pub last_ts: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticsReport {
    /// Rows of kind `write` or `compose`: user-visible file writes.
    pub total_writes: u64,
    pub bytes_written: u64,
    pub writes_per_path: BTreeMap<String, u64>,
    pub chunk_sessions: Vec<ChunkSessionSummary>,
    /// Writes per minute across the journal's time span; 0 with fewer than
    /// two rows or a zero span.
    pub write_velocity: f64,
    pub span: Option<Span>,
}

pub fn analyze(rows: &[JournalRow]) -> AnalyticsReport {
    let mut total_writes = 0u64;
    let mut bytes_written = 0u64;
    let mut writes_per_path: BTreeMap<String, u64> = BTreeMap::new();
    let mut session_chunks: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut composed: BTreeSet<String> = BTreeSet::new();

    for row in rows {
        match row.kind {
            RowKind::Write | RowKind::Compose => {
                total_writes += 1;
                bytes_written += row.bytes;
                *writes_per_path.entry(row.path.clone()).or_insert(0) += 1;
                if row.kind == RowKind::Compose {
                    if let Some(session) = &row.session {
                        composed.insert(session.clone());
                    }
                }
            }
            RowKind::Chunk => {
                if let Some(session) = &row.session {
                    session_chunks
                        .entry(session.clone())
                        .or_default()
                        .insert(row.path.clone());
                }
            }
            _ => {}
        }
    }

    let chunk_sessions = session_chunks
        .into_iter()
        .map(|(session, paths)| ChunkSessionSummary {
            composed: composed.contains(&session),
            chunks: paths.len() as u64,
            session,
        })
        .collect();

    let span = match (rows.first(), rows.last()) {
        (Some(first), Some(last)) => Some(Span {
            first_ts: first.ts.clone(),
            last_ts: last.ts.clone(),
        }),
        _ => None,
    };

    let write_velocity = match &span {
        Some(span) if rows.len() >= 2 => {
            let first = DateTime::parse_from_rfc3339(&span.first_ts);
            let last = DateTime::parse_from_rfc3339(&span.last_ts);
            match (first, last) {
                (Ok(first), Ok(last)) => {
                    let minutes = (last - first).num_milliseconds() as f64 / 60_000.0;
                    if minutes > 0.0 {
                        total_writes as f64 / minutes
                    } else {
                        0.0
                    }
                }
                _ => 0.0,
            }
        }
        _ => 0.0,
    };

    AnalyticsReport {
        total_writes,
        bytes_written,
        writes_per_path,
        chunk_sessions,
        write_velocity,
        span,
    }
}
