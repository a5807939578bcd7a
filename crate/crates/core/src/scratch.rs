//! Content-addressed scratchpad.
//!
//! Material that must not enter the workspace tree (captured credentials,
//! PII fixtures, binary blobs) is deposited under
//! `.resilient_write/scratch/<sha256>.bin`, keyed by its own hash.
//! Identical payloads deduplicate to one blob while metadata entries in
//! `index.jsonl` accumulate per deposit, so several labels can alias one
//! payload. Reads re-hash the blob to catch manual edits, and the
//! RW_SCRATCH_DISABLE_GET environment variable turns the store into a
//! write-only deposit box. Blobs are plaintext: encryption at rest belongs
//! to the filesystem layer, not this server.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::atomic::{hash_bytes, is_sha256_hex, write_file_atomic};
use crate::envelope::{ErrorKind, Failure, ReasonHint};
use crate::journal::{append_jsonl_line, now_iso_millis, NewRow, RowKind};
use crate::ToolContext;

pub const SCRATCH_RELATIVE_DIR: &str = ".resilient_write/scratch";
pub const INDEX_FILE: &str = "index.jsonl";
pub const GATE_ENV_VAR: &str = "RW_SCRATCH_DISABLE_GET";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScratchEntry {
    pub sha256: String,
    pub label: String,
    pub content_type: String,
    pub ts: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PutReceipt {
    pub sha256: String,
    pub bytes: u64,
    pub deduplicated: bool,
    pub label: String,
}

fn scratch_dir(ctx: &ToolContext) -> PathBuf {
    ctx.root.path().join(SCRATCH_RELATIVE_DIR)
}

fn blob_path(ctx: &ToolContext, sha256: &str) -> PathBuf {
    scratch_dir(ctx).join(format!("{sha256}.bin"))
}

pub fn scratch_put(
    ctx: &mut ToolContext,
    content: &[u8],
    label: &str,
    content_type: &str,
) -> Result<PutReceipt, Failure> {
    if content.is_empty() {
        return Err(Failure::policy(ReasonHint::Unknown, "scratch content must be non-empty"));
    }
    let sha256 = hash_bytes(content);
    let blob = blob_path(ctx, &sha256);
    let deduplicated = blob.exists();
    if !deduplicated {
        write_file_atomic(&blob, content)?;
        // Metadata-only journal row; payload bytes never reach the journal.
        ctx.journal.append(
            NewRow {
                kind: RowKind::Scratch,
                path: ctx.root.relativize(&blob),
                sha256: sha256.clone(),
                bytes: content.len() as u64,
                mode: "create".to_string(),
                session: None,
                detail: None,
            },
            ctx.caller,
        )?;
    }
    let entry = ScratchEntry {
        sha256: sha256.clone(),
        label: label.to_string(),
        content_type: content_type.to_string(),
        ts: now_iso_millis(),
        bytes: content.len() as u64,
    };
    let value = serde_json::to_value(&entry).expect("entry serialises");
    append_jsonl_line(&scratch_dir(ctx).join(INDEX_FILE), &value)?;
    Ok(PutReceipt {
        sha256,
        bytes: content.len() as u64,
        deduplicated,
        label: label.to_string(),
    })
}

/// Metadata lookup by hash or label; content bytes are never included.
pub fn scratch_ref(
    ctx: &ToolContext,
    sha256: Option<&str>,
    label: Option<&str>,
) -> Result<(Vec<ScratchEntry>, Vec<String>), Failure> {
    if sha256.is_none() && label.is_none() {
        return Err(Failure::policy(ReasonHint::Unknown, "provide sha256 or label"));
    }
    if let Some(hash) = sha256 {
        if !is_sha256_hex(hash) {
            return Err(Failure::policy(ReasonHint::Encoding, "sha256 must be 64 lowercase hex characters")
                .with_context("sha256", json!(hash)));
        }
    }
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    let index = scratch_dir(ctx).join(INDEX_FILE);
    let text = std::fs::read_to_string(&index).unwrap_or_default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ScratchEntry>(line) {
            Ok(entry) => {
                let hash_ok = sha256.map(|h| entry.sha256 == h).unwrap_or(true);
                let label_ok = label.map(|l| entry.label == l).unwrap_or(true);
                if hash_ok && label_ok {
                    entries.push(entry);
                }
            }
            Err(e) => warnings.push(format!("index line {} skipped: {}", i + 1, e)),
        }
    }
    Ok((entries, warnings))
}

pub fn scratch_get(ctx: &ToolContext, sha256: &str) -> Result<Vec<u8>, Failure> {
    if ctx.scratch_get_disabled {
        return Err(Failure::new(ErrorKind::PolicyViolation, ReasonHint::Permission)
            .with_action("scratch_put")
            .with_context(
                "detail",
                json!(format!(
                    "scratch reads are disabled by {GATE_ENV_VAR}; the scratchpad is in write-only deposit-box mode"
                )),
            ));
    }
    if !is_sha256_hex(sha256) {
        return Err(Failure::policy(ReasonHint::Encoding, "sha256 must be 64 lowercase hex characters")
            .with_context("sha256", json!(sha256)));
    }
    let blob = blob_path(ctx, sha256);
    if !blob.exists() {
        return Err(Failure::new(ErrorKind::PolicyViolation, ReasonHint::Unknown)
            .with_context("sha256", json!(sha256))
            .with_context("detail", json!("no blob with this hash")));
    }
    let bytes = std::fs::read(&blob)
        .map_err(|e| Failure::policy(ReasonHint::Permission, &format!("failed to read blob: {e}")))?;
    let actual = hash_bytes(&bytes);
    if actual != sha256 {
        return Err(Failure::new(ErrorKind::WriteCorruption, ReasonHint::Unknown)
            .with_context("expected", json!(sha256))
            .with_context("actual", json!(actual))
            .with_context("detail", json!("blob content no longer matches its hash; it was modified on disk")));
    }
    Ok(bytes)
}
