//! Typed error envelopes and the retry-budget ledger.
//!
//! Every failing tool call, regardless of which layer it failed in, is
//! reported as one uniform JSON envelope so that an agent can branch on
//! `error` / `reason_hint` instead of parsing prose. The retry budget
//! embedded in each envelope decrements on identical retries and halts
//! blind retry loops within one server process.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

/// The five error kinds an envelope may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Blocked,
    StalePrecondition,
    WriteCorruption,
    QuotaExceeded,
    PolicyViolation,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Blocked => "blocked",
            ErrorKind::StalePrecondition => "stale_precondition",
            ErrorKind::WriteCorruption => "write_corruption",
            ErrorKind::QuotaExceeded => "quota_exceeded",
            ErrorKind::PolicyViolation => "policy_violation",
        }
    }
}

/// The six reason hints that categorise the underlying cause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonHint {
    ContentFilter,
    SizeLimit,
    Encoding,
    Permission,
    Network,
    Unknown,
}

impl ReasonHint {
    pub fn as_str(self) -> &'static str {
        match self {
            ReasonHint::ContentFilter => "content_filter",
            ReasonHint::SizeLimit => "size_limit",
            ReasonHint::Encoding => "encoding",
            ReasonHint::Permission => "permission",
            ReasonHint::Network => "network",
            ReasonHint::Unknown => "unknown",
        }
    }
}

/// Closed vocabulary of suggested recovery actions.
pub const SUGGESTED_ACTIONS: [&str; 7] = [
    "redact",
    "chunk",
    "scratch_put",
    "refresh_precondition",
    "retry_write",
    "reduce_size",
    "fix_path",
];

/// A failure produced by a layer module, before the retry ledger has
/// assigned it a budget. [`Failure::into_envelope`] finalises it.
#[derive(Debug, Clone)]
pub struct Failure {
    pub kind: ErrorKind,
    pub reason_hint: ReasonHint,
    pub detected_patterns: Vec<String>,
    pub suggested_action: &'static str,
    pub context: Map<String, Value>,
}

impl Failure {
    pub fn new(kind: ErrorKind, reason_hint: ReasonHint) -> Self {
        Failure {
            kind,
            reason_hint,
            detected_patterns: Vec::new(),
            suggested_action: default_action(kind),
            context: Map::new(),
        }
    }

    pub fn with_action(mut self, action: &'static str) -> Self {
        debug_assert!(SUGGESTED_ACTIONS.contains(&action));
        self.suggested_action = action;
        self
    }

    pub fn with_patterns(mut self, patterns: Vec<String>) -> Self {
        self.detected_patterns = patterns;
        self
    }

    pub fn with_context(mut self, key: &str, value: Value) -> Self {
        self.context.insert(key.to_string(), value);
        self
    }

    /// Shorthand for the most common failure shape.
    pub fn policy(reason_hint: ReasonHint, detail: &str) -> Self {
        Failure::new(ErrorKind::PolicyViolation, reason_hint)
            .with_context("detail", Value::String(detail.to_string()))
    }

    /// Finalise into a serialisable envelope with the given remaining budget.
    pub fn into_envelope(self, retry_budget: u32) -> ErrorEnvelope {
        let retriable = retry_budget > 0 && self.reason_hint != ReasonHint::ContentFilter;
        ErrorEnvelope {
            ok: false,
            error: self.kind,
            reason_hint: self.reason_hint,
            detected_patterns: self.detected_patterns,
            suggested_action: self.suggested_action.to_string(),
            retry_budget,
            retriable,
            context: Value::Object(self.context),
        }
    }
}

fn default_action(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Blocked => "redact",
        ErrorKind::StalePrecondition => "refresh_precondition",
        ErrorKind::WriteCorruption => "retry_write",
        ErrorKind::QuotaExceeded => "reduce_size",
        ErrorKind::PolicyViolation => "fix_path",
    }
}

/// The uniform failure record shared by every tool.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorEnvelope {
    /// Always `false`; success responses carry `ok: true` and no `error`.
    pub ok: bool,
    pub error: ErrorKind,
    pub reason_hint: ReasonHint,
    pub detected_patterns: Vec<String>,
    pub suggested_action: String,
    pub retry_budget: u32,
    pub retriable: bool,
    pub context: Value,
}

impl ErrorEnvelope {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("envelope serialises")
    }
}

/// Identity of a failing call: same tool, same path, same content bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RetryKey {
    pub tool: String,
    pub path: String,
    pub content_sha256: String,
}

#[derive(Debug, Clone)]
struct LedgerEntry {
    remaining: u32,
    kind: ErrorKind,
    reason_hint: ReasonHint,
    suggested_action: &'static str,
    detected_patterns: Vec<String>,
}

/// In-memory, process-lifetime retry ledger.
///
/// The budget is surfaced only through envelopes; nothing is persisted, so a
/// fresh server process starts every key at the full default budget. For a
/// fixed key the reported budget never increases: a caller-supplied
/// `retry_budget` argument can tighten the remaining budget but not raise it.
#[derive(Debug)]
pub struct RetryLedger {
    default_budget: u32,
    entries: HashMap<RetryKey, LedgerEntry>,
}

impl RetryLedger {
    pub fn new(default_budget: u32) -> Self {
        RetryLedger {
            default_budget,
            entries: HashMap::new(),
        }
    }

    pub fn default_budget(&self) -> u32 {
        self.default_budget
    }

    /// Pre-execution check: a key whose budget is exhausted is refused
    /// outright, echoing the kind and hint of the failure that spent it.
    pub fn refusal(&self, key: &RetryKey) -> Option<ErrorEnvelope> {
        let entry = self.entries.get(key)?;
        if entry.remaining > 0 {
            return None;
        }
        let mut failure = Failure::new(entry.kind, entry.reason_hint)
            .with_patterns(entry.detected_patterns.clone())
            .with_context("retry_exhausted", Value::Bool(true))
            .with_context(
                "detail",
                json!("identical call refused: retry budget exhausted; change the content or strategy"),
            );
        failure.suggested_action = entry.suggested_action;
        Some(failure.into_envelope(0))
    }

    /// Record a failure and return the remaining budget to embed in the
    /// envelope. The first failure for a key reports the full budget; each
    /// identical retry reports one less, down to zero.
    pub fn charge(&mut self, key: RetryKey, failure: &Failure, cap: Option<u32>) -> u32 {
        let default_budget = self.default_budget;
        let entry = self.entries.entry(key).or_insert_with(|| LedgerEntry {
            // Stored value is one above the first report so the decrement
            // below lands on `default_budget` for a fresh key.
            remaining: default_budget.saturating_add(1),
            kind: failure.kind,
            reason_hint: failure.reason_hint,
            suggested_action: failure.suggested_action,
            detected_patterns: failure.detected_patterns.clone(),
        });
        entry.remaining = entry.remaining.saturating_sub(1);
        if let Some(cap) = cap {
            entry.remaining = entry.remaining.min(cap);
        }
        entry.kind = failure.kind;
        entry.reason_hint = failure.reason_hint;
        entry.suggested_action = failure.suggested_action;
        entry.detected_patterns = failure.detected_patterns.clone();
        entry.remaining
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(content: &str) -> RetryKey {
        RetryKey {
            tool: "rw.safe_write".into(),
            path: "a.txt".into(),
            content_sha256: crate::atomic::hash_bytes(content.as_bytes()),
        }
    }

    #[test]
    fn first_failure_reports_full_budget() {
        let mut ledger = RetryLedger::new(3);
        let failure = Failure::new(ErrorKind::Blocked, ReasonHint::ContentFilter);
        assert_eq!(ledger.charge(key("x"), &failure, None), 3);
    }

    #[test]
    fn identical_retries_decrement() {
        let mut ledger = RetryLedger::new(3);
        let failure = Failure::new(ErrorKind::Blocked, ReasonHint::ContentFilter);
        let budgets: Vec<u32> = (0..3).map(|_| ledger.charge(key("x"), &failure, None)).collect();
        assert_eq!(budgets, vec![3, 2, 1]);
    }

    #[test]
    fn exhausted_key_is_refused() {
        let mut ledger = RetryLedger::new(1);
        let failure = Failure::new(ErrorKind::Blocked, ReasonHint::ContentFilter);
        ledger.charge(key("x"), &failure, None);
        ledger.charge(key("x"), &failure, None);
        let refusal = ledger.refusal(&key("x")).expect("budget exhausted");
        assert_eq!(refusal.retry_budget, 0);
        assert!(!refusal.retriable);
        assert_eq!(refusal.error, ErrorKind::Blocked);
    }

    #[test]
    fn different_content_resets_budget() {
        let mut ledger = RetryLedger::new(2);
        let failure = Failure::new(ErrorKind::Blocked, ReasonHint::ContentFilter);
        ledger.charge(key("x"), &failure, None);
        ledger.charge(key("x"), &failure, None);
        assert_eq!(ledger.charge(key("y"), &failure, None), 2);
    }

    #[test]
    fn caller_cap_tightens_but_never_raises() {
        let mut ledger = RetryLedger::new(5);
        let failure = Failure::new(ErrorKind::QuotaExceeded, ReasonHint::SizeLimit);
        assert_eq!(ledger.charge(key("x"), &failure, Some(1)), 1);
        // A later generous cap cannot push the budget back up.
        assert_eq!(ledger.charge(key("x"), &failure, Some(9)), 0);
    }

    #[test]
    fn content_filter_is_never_retriable() {
        let failure = Failure::new(ErrorKind::Blocked, ReasonHint::ContentFilter);
        let envelope = failure.into_envelope(3);
        assert!(!envelope.retriable);
        assert_eq!(envelope.retry_budget, 3);
    }

    #[test]
    fn zero_budget_is_never_retriable() {
        let failure = Failure::new(ErrorKind::QuotaExceeded, ReasonHint::SizeLimit);
        assert!(!failure.into_envelope(0).retriable);
    }

    #[test]
    fn other_hints_with_budget_are_retriable() {
        let failure = Failure::new(ErrorKind::WriteCorruption, ReasonHint::Unknown);
        assert!(failure.clone().into_envelope(2).retriable);
        let quota = Failure::new(ErrorKind::QuotaExceeded, ReasonHint::SizeLimit).with_action("chunk");
        let envelope = quota.into_envelope(1);
        assert!(envelope.retriable);
        assert_eq!(envelope.suggested_action, "chunk");
    }

    #[test]
    fn blocked_envelope_has_the_canonical_wire_shape() {
        let envelope = Failure::new(ErrorKind::Blocked, ReasonHint::ContentFilter)
            .with_patterns(vec!["api_key".to_string()])
            .with_action("redact")
            .with_context("score", json!(0.82))
            .into_envelope(2);
        let value = envelope.to_value();
        assert_eq!(
            value,
            serde_json::json!({
                "ok": false,
                "error": "blocked",
                "reason_hint": "content_filter",
                "detected_patterns": ["api_key"],
                "suggested_action": "redact",
                "retry_budget": 2,
                "retriable": false,
                "context": {"score": 0.82},
            })
        );
    }

    #[test]
    fn envelope_serialises_with_wire_names() {
        let envelope = Failure::new(ErrorKind::StalePrecondition, ReasonHint::Unknown)
            .with_context("expected", json!("aa"))
            .into_envelope(2);
        let value = envelope.to_value();
        assert_eq!(value["ok"], json!(false));
        assert_eq!(value["error"], json!("stale_precondition"));
        assert_eq!(value["reason_hint"], json!("unknown"));
        assert_eq!(value["context"]["expected"], json!("aa"));
    }
}
