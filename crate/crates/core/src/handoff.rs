//! Task-continuity handoff envelopes.
//!
//! `rw.handoff_write` serialises task state to `HANDOFF.md` at the
//! workspace root: YAML front matter (task id, status, summary, next steps,
//! per-file hashes) followed by an optional Markdown body. On resume,
//! `rw.handoff_read` re-hashes every file listed in `last_good_state` and
//! reports drift as warnings, never errors: a file edited between
//! sessions is information, not a failure.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::atomic::{hash_bytes, is_sha256_hex, safe_write_kind, write_file_atomic, WriteMode, WriteRequest, WriteReceipt};
use crate::envelope::{ErrorKind, Failure, ReasonHint};
use crate::journal::RowKind;
use crate::workspace::resolve_path;
use crate::yaml::{self, Yaml};
use crate::ToolContext;

pub const HANDOFF_FILE: &str = "HANDOFF.md";
pub const ARCHIVE_RELATIVE_DIR: &str = ".resilient_write/handoffs";

/// Task status vocabulary. `partial` is the common mid-flight value; the
/// rest cover blocked, finished, and given-up tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandoffStatus {
    Partial,
    Blocked,
    Complete,
    Abandoned,
}

impl HandoffStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            HandoffStatus::Partial => "partial",
            HandoffStatus::Blocked => "blocked",
            HandoffStatus::Complete => "complete",
            HandoffStatus::Abandoned => "abandoned",
        }
    }

    pub fn parse(s: &str) -> Option<HandoffStatus> {
        match s {
            "partial" => Some(HandoffStatus::Partial),
            "blocked" => Some(HandoffStatus::Blocked),
            "complete" => Some(HandoffStatus::Complete),
            "abandoned" => Some(HandoffStatus::Abandoned),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoffEnvelope {
    pub task_id: String,
    pub status: HandoffStatus,
    pub agent: String,
    pub summary: String,
    pub next_steps: Vec<String>,
    pub last_good_state: Vec<FileDigest>,
    pub body: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftWarning {
    pub path: String,
    pub recorded_sha256: String,
    /// Current digest, or the string "missing" when the file is gone.
    pub current_sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HandoffWriteReceipt {
    #[serde(flatten)]
    pub receipt: WriteReceipt,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archived_to: Option<String>,
}

fn task_id_valid(task_id: &str) -> bool {
    !task_id.is_empty()
        && task_id.len() <= 64
        && task_id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'))
}

fn validate_envelope(ctx: &ToolContext, envelope: &HandoffEnvelope) -> Result<(), Failure> {
    if !task_id_valid(&envelope.task_id) {
        return Err(Failure::policy(ReasonHint::Unknown, "task_id must match [A-Za-z0-9._-]{1,64}")
            .with_context("task_id", json!(envelope.task_id)));
    }
    for digest in &envelope.last_good_state {
        if !is_sha256_hex(&digest.sha256) {
            return Err(Failure::policy(
                ReasonHint::Encoding,
                "last_good_state sha256 values must be 64 lowercase hex characters",
            )
            .with_context("path", json!(digest.path))
            .with_context("sha256", json!(digest.sha256)));
        }
        resolve_path(ctx.root, &digest.path)?;
    }
    Ok(())
}

/// Render the envelope as front matter plus body. The body is appended
/// verbatim after the closing delimiter.
pub fn render(envelope: &HandoffEnvelope) -> String {
    let front = Yaml::Map(vec![
        ("task_id".into(), Yaml::Str(envelope.task_id.clone())),
        ("status".into(), Yaml::Str(envelope.status.as_str().to_string())),
        ("agent".into(), Yaml::Str(envelope.agent.clone())),
        ("summary".into(), Yaml::Str(envelope.summary.clone())),
        (
            "next_steps".into(),
            Yaml::Seq(envelope.next_steps.iter().cloned().map(Yaml::Str).collect()),
        ),
        (
            "last_good_state".into(),
            Yaml::Seq(
                envelope
                    .last_good_state
                    .iter()
                    .map(|d| {
                        Yaml::Map(vec![
                            ("path".into(), Yaml::Str(d.path.clone())),
                            ("sha256".into(), Yaml::Str(d.sha256.clone())),
                        ])
                    })
                    .collect(),
            ),
        ),
    ]);
    let mut out = String::from("---\n");
    out.push_str(&yaml::emit(&front));
    out.push_str("---\n");
    if let Some(body) = &envelope.body {
        out.push_str(body);
    }
    out
}

/// Split a handoff document into front-matter text and verbatim body.
fn split_front_matter(content: &str) -> Result<(&str, &str), Failure> {
    let after_open = content.strip_prefix("---\n").ok_or_else(|| {
        Failure::policy(ReasonHint::Encoding, "HANDOFF.md must begin with a '---' front matter line")
    })?;
    if let Some(body) = after_open.strip_prefix("---\n") {
        Ok(("", body)) // empty front matter; the key checks will complain
    } else if after_open == "---" {
        Ok(("", ""))
    } else if let Some(pos) = after_open.find("\n---\n") {
        Ok((&after_open[..pos], &after_open[pos + 5..]))
    } else if let Some(front) = after_open.strip_suffix("\n---") {
        Ok((front, ""))
    } else {
        Err(Failure::policy(ReasonHint::Encoding, "front matter is not closed by a '---' line"))
    }
}

pub fn parse(content: &str) -> Result<HandoffEnvelope, Failure> {
    let (front_text, body) = split_front_matter(content)?;
    let front = yaml::parse(front_text).map_err(|e| {
        Failure::new(ErrorKind::PolicyViolation, ReasonHint::Encoding)
            .with_context("yaml_error", json!(e.to_string()))
            .with_context("detail", json!("front matter is not parseable YAML"))
    })?;

    let field = |name: &str| -> Result<&Yaml, Failure> {
        front.get(name).ok_or_else(|| {
            Failure::policy(ReasonHint::Encoding, &format!("front matter is missing required key {name:?}"))
        })
    };
    let string_of = |value: &Yaml, name: &str| -> Result<String, Failure> {
        value
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| Failure::policy(ReasonHint::Encoding, &format!("front matter key {name:?} must be a string")))
    };

    let task_id = string_of(field("task_id")?, "task_id")?;
    let status_text = string_of(field("status")?, "status")?;
    let status = HandoffStatus::parse(&status_text).ok_or_else(|| {
        Failure::policy(ReasonHint::Unknown, "status must be one of partial, blocked, complete, abandoned")
            .with_context("status", json!(status_text))
    })?;
    let summary = string_of(field("summary")?, "summary")?;
    let agent = match front.get("agent") {
        Some(v) => string_of(v, "agent")?,
        None => "unknown".to_string(),
    };
    let mut next_steps = Vec::new();
    if let Some(v) = front.get("next_steps") {
        let items = v
            .as_seq()
            .ok_or_else(|| Failure::policy(ReasonHint::Encoding, "next_steps must be a list"))?;
        for item in items {
            next_steps.push(string_of(item, "next_steps entry")?);
        }
    }
    let mut last_good_state = Vec::new();
    if let Some(v) = front.get("last_good_state") {
        let items = v
            .as_seq()
            .ok_or_else(|| Failure::policy(ReasonHint::Encoding, "last_good_state must be a list"))?;
        for item in items {
            let path = item
                .get("path")
                .and_then(Yaml::as_str)
                .ok_or_else(|| Failure::policy(ReasonHint::Encoding, "last_good_state entries need a path"))?;
            let sha256 = item
                .get("sha256")
                .and_then(Yaml::as_str)
                .ok_or_else(|| Failure::policy(ReasonHint::Encoding, "last_good_state entries need a sha256"))?;
            last_good_state.push(FileDigest {
                path: path.to_string(),
                sha256: sha256.to_string(),
            });
        }
    }

    Ok(HandoffEnvelope {
        task_id,
        status,
        agent,
        summary,
        next_steps,
        last_good_state,
        body: if body.is_empty() { None } else { Some(body.to_string()) },
    })
}

pub fn handoff_write(
    ctx: &mut ToolContext,
    envelope: &HandoffEnvelope,
    archive: bool,
) -> Result<HandoffWriteReceipt, Failure> {
    validate_envelope(ctx, envelope)?;
    let handoff_path = ctx.root.path().join(HANDOFF_FILE);

    let mut archived_to = None;
    if archive && handoff_path.exists() {
        let previous = std::fs::read(&handoff_path)
            .map_err(|e| Failure::policy(ReasonHint::Permission, &format!("cannot read existing HANDOFF.md: {e}")))?;
        let archive_path = archive_destination(ctx.root.path());
        write_file_atomic(&archive_path, &previous)?;
        archived_to = Some(ctx.root.relativize(&archive_path));
    }

    let rendered = render(envelope);
    let receipt = safe_write_kind(
        ctx,
        WriteRequest {
            path: HANDOFF_FILE.to_string(),
            content: rendered.into_bytes(),
            mode: WriteMode::Overwrite,
            expected_prev_sha256: None,
        },
        RowKind::Handoff,
        None,
    )?;
    Ok(HandoffWriteReceipt {
        receipt,
        archived_to,
    })
}

/// Lexicographically sortable archive name; a numeric suffix resolves
/// same-second collisions.
fn archive_destination(root: &Path) -> std::path::PathBuf {
    let dir = root.join(ARCHIVE_RELATIVE_DIR);
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    let base = dir.join(format!("{stamp}-{HANDOFF_FILE}"));
    if !base.exists() {
        return base;
    }
    for n in 2.. {
        let candidate = dir.join(format!("{stamp}-{n}-{HANDOFF_FILE}"));
        if !candidate.exists() {
            return candidate;
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, Serialize)]
pub struct HandoffReadResult {
    pub envelope: HandoffEnvelope,
    pub drift: Vec<DriftWarning>,
}

pub fn handoff_read(ctx: &ToolContext) -> Result<HandoffReadResult, Failure> {
    let handoff_path = ctx.root.path().join(HANDOFF_FILE);
    if !handoff_path.exists() {
        return Err(Failure::new(ErrorKind::PolicyViolation, ReasonHint::Unknown)
            .with_context("detail", json!("no HANDOFF.md in this workspace")));
    }
    let content = std::fs::read_to_string(&handoff_path)
        .map_err(|e| Failure::policy(ReasonHint::Encoding, &format!("HANDOFF.md is not readable UTF-8: {e}")))?;
    let envelope = parse(&content)?;

    let mut drift = Vec::new();
    for digest in &envelope.last_good_state {
        let current = resolve_path(ctx.root, &digest.path)
            .ok()
            .filter(|p| p.exists())
            .and_then(|p| std::fs::read(p).ok())
            .map(|bytes| hash_bytes(&bytes));
        match current {
            Some(current) if current == digest.sha256 => {}
            Some(current) => drift.push(DriftWarning {
                path: digest.path.clone(),
                recorded_sha256: digest.sha256.clone(),
                current_sha256: current,
            }),
            None => drift.push(DriftWarning {
                path: digest.path.clone(),
                recorded_sha256: digest.sha256.clone(),
                current_sha256: "missing".to_string(),
            }),
        }
    }
    Ok(HandoffReadResult { envelope, drift })
}
