//! Resumable chunked composition.
//!
//! Large or risky writes are decomposed into numbered part files under
//! `.resilient_write/chunks/<session>/`. Chunk files on disk are the source
//! of truth; the manifest is a derived cache that any fresh agent can
//! rebuild with `rw.chunk_status`. Compose concatenates the parts in index
//! order, byte-for-byte with no separators, after checking contiguity and the
//! expected chunk count, and preview runs exactly the same checks without
//! touching the filesystem.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::atomic::{hash_bytes, safe_write_kind, write_file_atomic, WriteMode, WriteReceipt, WriteRequest};
use crate::envelope::{ErrorKind, Failure, ReasonHint};
use crate::journal::{now_iso_millis, NewRow, RowKind};
use crate::ToolContext;

pub const CHUNKS_RELATIVE_DIR: &str = ".resilient_write/chunks";
const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkManifest {
    pub created_at: String,
    pub updated_at: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_expected: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChunkReceipt {
    pub session_id: String,
    pub index: u64,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    pub journal_seq: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_expected: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChunkStatus {
    pub session_id: String,
    pub exists: bool,
    pub indices: Vec<u64>,
    pub gaps: Vec<u64>,
    pub total_bytes: u64,
    pub chunk_bytes: Vec<ChunkByteCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_expected: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub updated_at: Option<String>,
    /// Seconds since the session was created, so operators can spot stale
    /// sessions left over from abandoned attempts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub age_seconds: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChunkByteCount {
    pub index: u64,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChunkPreview {
    pub session_id: String,
    pub content: String,
    pub chunk_count: u64,
    pub total_bytes: u64,
    pub sha256: String,
}

pub fn session_id_valid(session_id: &str) -> bool {
    !session_id.is_empty()
        && session_id.len() <= 64
        && session_id != "."
        && session_id != ".."
        && session_id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'))
}

fn bad_session(session_id: &str) -> Failure {
    Failure::new(ErrorKind::PolicyViolation, ReasonHint::Permission)
        .with_context("session_id", json!(session_id))
        .with_context(
            "detail",
            json!("session_id must match [A-Za-z0-9._-]{1,64}"),
        )
}

fn session_dir(ctx: &ToolContext, session_id: &str) -> Result<PathBuf, Failure> {
    if !session_id_valid(session_id) {
        return Err(bad_session(session_id));
    }
    Ok(ctx.root.path().join(CHUNKS_RELATIVE_DIR).join(session_id))
}

pub fn part_file_name(index: u64) -> String {
    format!("part-{index:03}.txt")
}

fn parse_part_index(name: &str) -> Option<u64> {
    let rest = name.strip_prefix("part-")?.strip_suffix(".txt")?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// Indices present on disk, with their byte sizes, sorted ascending.
fn scan_session(dir: &Path) -> Vec<(u64, u64)> {
    let mut found = Vec::new();
    let Ok(entries) = std::fs::read_dir(dir) else {
        return found;
    };
    for entry in entries.flatten() {
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(index) = parse_part_index(name) {
            let bytes = entry.metadata().map(|m| m.len()).unwrap_or(0);
            found.push((index, bytes));
        }
    }
    found.sort_unstable();
    found
}

fn read_manifest(dir: &Path) -> Option<ChunkManifest> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE)).ok()?;
    serde_json::from_str(&text).ok()
}

/// Persist one chunk. Chunks are written in overwrite mode so an agent can
/// retry a failed chunk with identical arguments and converge on the same
/// on-disk state.
pub fn chunk_write(
    ctx: &mut ToolContext,
    session_id: &str,
    index: u64,
    content: &str,
    total_expected: Option<u64>,
) -> Result<ChunkReceipt, Failure> {
    if index == 0 {
        return Err(Failure::policy(ReasonHint::Unknown, "chunk index is 1-based; index 0 is invalid"));
    }
    let dir = session_dir(ctx, session_id)?;
    let manifest = read_manifest(&dir);

    // A conflicting expectation is rejected before anything is persisted.
    if let (Some(requested), Some(existing)) = (total_expected, manifest.as_ref().and_then(|m| m.total_expected)) {
        if requested != existing {
            return Err(Failure::new(ErrorKind::PolicyViolation, ReasonHint::Unknown)
                .with_context("total_expected", json!(requested))
                .with_context("manifest_total_expected", json!(existing))
                .with_context("detail", json!("total_expected conflicts with the session manifest")));
        }
    }

    let part_path = dir.join(part_file_name(index));
    let bytes = content.as_bytes();
    write_file_atomic(&part_path, bytes)?;

    let now = now_iso_millis();
    let updated = ChunkManifest {
        created_at: manifest.as_ref().map(|m| m.created_at.clone()).unwrap_or_else(|| now.clone()),
        updated_at: now,
        total_expected: total_expected.or(manifest.as_ref().and_then(|m| m.total_expected)),
    };
    let manifest_json = serde_json::to_value(&updated).expect("manifest serialises");
    write_file_atomic(
        &dir.join(MANIFEST_FILE),
        serde_json::to_string_pretty(&manifest_json)
            .expect("manifest serialises")
            .as_bytes(),
    )?;

    let sha256 = hash_bytes(bytes);
    let relative = ctx.root.relativize(&part_path);
    let journal_seq = ctx.journal.append(
        NewRow {
            kind: RowKind::Chunk,
            path: relative.clone(),
            sha256: sha256.clone(),
            bytes: bytes.len() as u64,
            mode: "overwrite".to_string(),
            session: Some(session_id.to_string()),
            detail: None,
        },
        ctx.caller,
    )?;

    Ok(ChunkReceipt {
        session_id: session_id.to_string(),
        index,
        path: relative,
        sha256,
        bytes: bytes.len() as u64,
        journal_seq,
        total_expected: updated.total_expected,
    })
}

/// Persist the next chunk: highest existing index plus one, or 1 for a
/// fresh session. Gaps are diagnosed at compose time, not here.
pub fn chunk_append(
    ctx: &mut ToolContext,
    session_id: &str,
    content: &str,
    total_expected: Option<u64>,
) -> Result<ChunkReceipt, Failure> {
    let dir = session_dir(ctx, session_id)?;
    let next = scan_session(&dir).last().map(|(i, _)| i + 1).unwrap_or(1);
    chunk_write(ctx, session_id, next, content, total_expected)
}

/// Disk-truth status: computed from the directory listing, never from the
/// manifest, so it survives manifest deletion.
pub fn chunk_status(ctx: &ToolContext, session_id: &str) -> Result<ChunkStatus, Failure> {
    let dir = session_dir(ctx, session_id)?;
    let found = scan_session(&dir);
    let exists = dir.is_dir();
    let indices: Vec<u64> = found.iter().map(|(i, _)| *i).collect();
    let gaps = find_gaps(&indices);
    let manifest = read_manifest(&dir);
    let age_seconds = manifest.as_ref().and_then(|m| {
        let created = chrono::DateTime::parse_from_rfc3339(&m.created_at).ok()?;
        Some((chrono::Utc::now() - created.with_timezone(&chrono::Utc)).num_seconds())
    });
    Ok(ChunkStatus {
        session_id: session_id.to_string(),
        exists,
        total_bytes: found.iter().map(|(_, b)| b).sum(),
        chunk_bytes: found
            .iter()
            .map(|&(index, bytes)| ChunkByteCount { index, bytes })
            .collect(),
        indices,
        gaps,
        total_expected: manifest.as_ref().and_then(|m| m.total_expected),
        created_at: manifest.as_ref().map(|m| m.created_at.clone()),
        updated_at: manifest.as_ref().map(|m| m.updated_at.clone()),
        age_seconds,
    })
}

/// Missing indices in 1..=max. An index set not starting at 1 therefore
/// reports the leading hole as a gap.
fn find_gaps(indices: &[u64]) -> Vec<u64> {
    let Some(&max) = indices.last() else {
        return Vec::new();
    };
    let mut gaps = Vec::new();
    let mut cursor = 0;
    for expected in 1..=max {
        if cursor < indices.len() && indices[cursor] == expected {
            cursor += 1;
        } else {
            gaps.push(expected);
        }
    }
    gaps
}

/// Contiguity and count checks shared verbatim by preview and compose, so
/// both reject a broken session with identical error contexts.
fn check_composable(
    ctx: &ToolContext,
    session_id: &str,
) -> Result<(PathBuf, Vec<(u64, u64)>), Failure> {
    let dir = session_dir(ctx, session_id)?;
    let found = scan_session(&dir);
    if found.is_empty() {
        return Err(Failure::new(ErrorKind::PolicyViolation, ReasonHint::Unknown)
            .with_context("session_id", json!(session_id))
            .with_context("detail", json!("session has no chunks")));
    }
    let indices: Vec<u64> = found.iter().map(|(i, _)| *i).collect();
    let gaps = find_gaps(&indices);
    if !gaps.is_empty() {
        return Err(Failure::new(ErrorKind::PolicyViolation, ReasonHint::Unknown)
            .with_context("session_id", json!(session_id))
            .with_context("gaps", json!(gaps))
            .with_context("indices", json!(indices))
            .with_context("detail", json!("chunk indices are not contiguous from 1")));
    }
    if let Some(expected) = read_manifest(&dir).and_then(|m| m.total_expected) {
        if indices.len() as u64 != expected {
            return Err(Failure::new(ErrorKind::PolicyViolation, ReasonHint::Unknown)
                .with_context("session_id", json!(session_id))
                .with_context("chunk_count", json!(indices.len()))
                .with_context("total_expected", json!(expected))
                .with_context("detail", json!("chunk count does not match the manifest's total_expected")));
        }
    }
    Ok((dir, found))
}

fn concatenate(dir: &Path, found: &[(u64, u64)]) -> Result<Vec<u8>, Failure> {
    let mut combined = Vec::new();
    for (index, _) in found {
        let part = dir.join(part_file_name(*index));
        let bytes = std::fs::read(&part).map_err(|e| {
            Failure::policy(ReasonHint::Unknown, &format!("failed to read chunk {index}: {e}"))
        })?;
        combined.extend_from_slice(&bytes);
    }
    Ok(combined)
}

/// Dry-run compose: same checks, same concatenation, no write, no journal
/// row.
pub fn chunk_preview(ctx: &ToolContext, session_id: &str) -> Result<ChunkPreview, Failure> {
    let (dir, found) = check_composable(ctx, session_id)?;
    let combined = concatenate(&dir, &found)?;
    Ok(ChunkPreview {
        session_id: session_id.to_string(),
        chunk_count: found.len() as u64,
        total_bytes: combined.len() as u64,
        sha256: hash_bytes(&combined),
        content: String::from_utf8_lossy(&combined).into_owned(),
    })
}

#[derive(Debug)]
pub struct ComposeOutcome {
    pub receipt: WriteReceipt,
    pub chunk_count: u64,
    pub cleaned: bool,
}

/// Concatenate all chunks in index order and write the result through the
/// atomic write path. The session directory is retained for audit unless
/// `cleanup` is set.
pub fn chunk_compose(
    ctx: &mut ToolContext,
    session_id: &str,
    target_path: &str,
    mode: WriteMode,
    cleanup: bool,
) -> Result<ComposeOutcome, Failure> {
    if mode == WriteMode::Append {
        return Err(Failure::policy(ReasonHint::Unknown, "compose supports create and overwrite modes only"));
    }
    let (dir, found) = check_composable(ctx, session_id)?;
    let combined = concatenate(&dir, &found)?;
    let receipt = safe_write_kind(
        ctx,
        WriteRequest {
            path: target_path.to_string(),
            content: combined,
            mode,
            expected_prev_sha256: None,
        },
        RowKind::Compose,
        Some(session_id),
    )?;
    let mut cleaned = false;
    if cleanup {
        cleaned = std::fs::remove_dir_all(&dir).is_ok();
    }
    Ok(ComposeOutcome {
        receipt,
        chunk_count: found.len() as u64,
        cleaned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::TestWorkspace;

    #[test]
    fn chunk_write_persists_part_and_manifest() {
        let mut ws = TestWorkspace::new();
        let receipt = ws
            .with_ctx(|ctx| chunk_write(ctx, "s1", 1, "Hello", Some(2)))
            .unwrap();
        assert_eq!(receipt.index, 1);
        assert_eq!(receipt.total_expected, Some(2));
        let dir = ws.root_path().join(CHUNKS_RELATIVE_DIR).join("s1");
        assert_eq!(std::fs::read_to_string(dir.join("part-001.txt")).unwrap(), "Hello");
        let manifest: ChunkManifest =
            serde_json::from_str(&std::fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap();
        assert_eq!(manifest.total_expected, Some(2));
        assert!(manifest.updated_at >= manifest.created_at);
    }

    #[test]
    fn chunk_retry_is_idempotent() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "Hello", Some(2))).unwrap();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "Hello", Some(2))).unwrap();
        let status = ws.with_ctx(|ctx| chunk_status(ctx, "s1")).unwrap();
        assert_eq!(status.indices, vec![1]);
        // retry journals again (audit), disk state unchanged
        let (rows, _) = ws.journal().tail(10);
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn conflicting_total_expected_is_rejected_with_both_values() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "a", Some(2))).unwrap();
        let failure = ws
            .with_ctx(|ctx| chunk_write(ctx, "s1", 2, "b", Some(5)))
            .unwrap_err();
        assert_eq!(failure.kind, ErrorKind::PolicyViolation);
        assert_eq!(failure.context["total_expected"], json!(5));
        assert_eq!(failure.context["manifest_total_expected"], json!(2));
    }

    #[test]
    fn unsafe_session_id_is_rejected() {
        let mut ws = TestWorkspace::new();
        for bad in ["../escape", "a/b", "", ".", "..", "x".repeat(65).as_str()] {
            let failure = ws.with_ctx(|ctx| chunk_write(ctx, bad, 1, "x", None)).unwrap_err();
            assert_eq!(failure.kind, ErrorKind::PolicyViolation, "{bad:?}");
        }
    }

    #[test]
    fn chunk_append_auto_increments() {
        let mut ws = TestWorkspace::new();
        let first = ws.with_ctx(|ctx| chunk_append(ctx, "s1", "a", None)).unwrap();
        assert_eq!(first.index, 1);
        let second = ws.with_ctx(|ctx| chunk_append(ctx, "s1", "b", None)).unwrap();
        assert_eq!(second.index, 2);
    }

    #[test]
    fn chunk_append_after_gap_takes_max_plus_one() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "a", None)).unwrap();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 3, "c", None)).unwrap();
        let next = ws.with_ctx(|ctx| chunk_append(ctx, "s1", "d", None)).unwrap();
        assert_eq!(next.index, 4);
    }

    #[test]
    fn status_reports_gaps() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "a", None)).unwrap();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 3, "c", None)).unwrap();
        let status = ws.with_ctx(|ctx| chunk_status(ctx, "s1")).unwrap();
        assert_eq!(status.indices, vec![1, 3]);
        assert_eq!(status.gaps, vec![2]);
        assert!(status.exists);
    }

    #[test]
    fn status_of_contiguous_session_has_no_gaps() {
        let mut ws = TestWorkspace::new();
        for (i, c) in ["a", "b", "c"].iter().enumerate() {
            ws.with_ctx(|ctx| chunk_write(ctx, "s1", (i + 1) as u64, c, None)).unwrap();
        }
        let status = ws.with_ctx(|ctx| chunk_status(ctx, "s1")).unwrap();
        assert!(status.gaps.is_empty());
        assert_eq!(status.total_bytes, 3);
    }

    #[test]
    fn status_of_unknown_session_is_empty_not_error() {
        let mut ws = TestWorkspace::new();
        let status = ws.with_ctx(|ctx| chunk_status(ctx, "nope")).unwrap();
        assert!(!status.exists);
        assert!(status.indices.is_empty());
        assert!(status.total_expected.is_none());
    }

    #[test]
    fn status_survives_manifest_deletion() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "abc", Some(1))).unwrap();
        std::fs::remove_file(
            ws.root_path().join(CHUNKS_RELATIVE_DIR).join("s1").join(MANIFEST_FILE),
        )
        .unwrap();
        let status = ws.with_ctx(|ctx| chunk_status(ctx, "s1")).unwrap();
        assert_eq!(status.indices, vec![1]);
        assert!(status.total_expected.is_none());
    }

    #[test]
    fn preview_concatenates_without_writing() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "Hel", Some(2))).unwrap();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 2, "lo", Some(2))).unwrap();
        let journal_before = std::fs::read_to_string(ws.journal().file_path()).unwrap();
        let preview = ws.with_ctx(|ctx| chunk_preview(ctx, "s1")).unwrap();
        assert_eq!(preview.content, "Hello");
        assert_eq!(preview.chunk_count, 2);
        let journal_after = std::fs::read_to_string(ws.journal().file_path()).unwrap();
        assert_eq!(journal_before, journal_after, "preview must not journal");
    }

    #[test]
    fn gap_rejected_by_preview_and_compose_with_matching_context() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "a", None)).unwrap();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 3, "c", None)).unwrap();
        let preview_err = ws.with_ctx(|ctx| chunk_preview(ctx, "s1")).unwrap_err();
        let compose_err = ws
            .with_ctx(|ctx| chunk_compose(ctx, "s1", "out.txt", WriteMode::Create, false))
            .unwrap_err();
        assert_eq!(preview_err.context, compose_err.context);
        assert_eq!(preview_err.context["gaps"], json!([2]));
        assert!(!ws.root_path().join("out.txt").exists());
    }

    #[test]
    fn count_mismatch_rejected_with_both_counts() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "a", Some(3))).unwrap();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 2, "b", None)).unwrap();
        let failure = ws
            .with_ctx(|ctx| chunk_compose(ctx, "s1", "out.txt", WriteMode::Create, false))
            .unwrap_err();
        assert_eq!(failure.context["chunk_count"], json!(2));
        assert_eq!(failure.context["total_expected"], json!(3));
    }

    #[test]
    fn indices_not_starting_at_one_are_rejected() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 2, "b", None)).unwrap();
        let failure = ws.with_ctx(|ctx| chunk_preview(ctx, "s1")).unwrap_err();
        assert_eq!(failure.context["gaps"], json!([1]));
    }

    #[test]
    fn compose_writes_exact_concatenation() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "Hel", Some(2))).unwrap();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 2, "lo", Some(2))).unwrap();
        let outcome = ws
            .with_ctx(|ctx| chunk_compose(ctx, "s1", "greeting.txt", WriteMode::Create, false))
            .unwrap();
        assert_eq!(std::fs::read_to_string(ws.root_path().join("greeting.txt")).unwrap(), "Hello");
        assert_eq!(outcome.receipt.sha256, hash_bytes(b"Hello"));
        assert_eq!(outcome.chunk_count, 2);
        // session retained by default
        assert!(ws.root_path().join(CHUNKS_RELATIVE_DIR).join("s1").exists());
        // journal: 2 chunk rows + 1 compose row
        let (rows, _) = ws.journal().tail(10);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].kind, RowKind::Compose);
        assert_eq!(rows[2].session.as_deref(), Some("s1"));
    }

    #[test]
    fn preview_equals_compose_content() {
        let mut ws = TestWorkspace::new();
        for (i, piece) in ["alpha\n", "beta\n", "gamma"].iter().enumerate() {
            ws.with_ctx(|ctx| chunk_write(ctx, "s1", (i + 1) as u64, piece, None)).unwrap();
        }
        let preview = ws.with_ctx(|ctx| chunk_preview(ctx, "s1")).unwrap();
        let outcome = ws
            .with_ctx(|ctx| chunk_compose(ctx, "s1", "out.txt", WriteMode::Create, false))
            .unwrap();
        let final_bytes = std::fs::read(ws.root_path().join("out.txt")).unwrap();
        assert_eq!(preview.content.as_bytes(), final_bytes.as_slice());
        assert_eq!(preview.sha256, outcome.receipt.sha256);
    }

    #[test]
    fn compose_cleanup_removes_session_dir() {
        let mut ws = TestWorkspace::new();
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 1, "x", None)).unwrap();
        let outcome = ws
            .with_ctx(|ctx| chunk_compose(ctx, "s1", "out.txt", WriteMode::Create, true))
            .unwrap();
        assert!(outcome.cleaned);
        assert!(!ws.root_path().join(CHUNKS_RELATIVE_DIR).join("s1").exists());
    }

    #[test]
    fn recovery_rewrite_then_compose_is_stable() {
        let mut ws = TestWorkspace::new();
        for (i, piece) in ["a", "b", "c"].iter().enumerate() {
            ws.with_ctx(|ctx| chunk_write(ctx, "s1", (i + 1) as u64, piece, Some(3))).unwrap();
        }
        // re-write a subset, as a recovering agent would
        ws.with_ctx(|ctx| chunk_write(ctx, "s1", 2, "b", Some(3))).unwrap();
        let outcome = ws
            .with_ctx(|ctx| chunk_compose(ctx, "s1", "out.txt", WriteMode::Create, false))
            .unwrap();
        assert_eq!(outcome.receipt.sha256, hash_bytes(b"abc"));
    }

    #[test]
    fn wide_indices_use_natural_width_past_999() {
        assert_eq!(part_file_name(7), "part-007.txt");
        assert_eq!(part_file_name(999), "part-999.txt");
        assert_eq!(part_file_name(1000), "part-1000.txt");
        assert_eq!(parse_part_index("part-1000.txt"), Some(1000));
        assert_eq!(parse_part_index("part-007.txt"), Some(7));
        assert_eq!(parse_part_index("manifest.json"), None);
        assert_eq!(parse_part_index("part-.txt"), None);
    }
}
