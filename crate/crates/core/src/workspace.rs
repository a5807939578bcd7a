//! Workspace root resolution, path containment, and per-workspace policy.
//!
//! The server binds to exactly one workspace root per process. Every
//! user-supplied path is resolved against that root and must stay inside it,
//! both lexically and after symlink resolution. A hard-coded deny-list stops
//! the server from ever treating system directories (or the user's home
//! directory itself) as a workspace.

use std::collections::BTreeMap;
use std::path::{Component, Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::envelope::{Failure, ReasonHint};
use crate::yaml::{self, Yaml};

pub const POLICY_RELATIVE_PATH: &str = ".resilient_write/policy.yaml";
pub const STATE_DIR: &str = ".resilient_write";

/// Where the root came from, in precedence order (flag wins over env wins
/// over cwd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootSource {
    CliFlag,
    Env,
    Cwd,
}

#[derive(Debug, Clone)]
pub struct WorkspaceRoot {
    path: PathBuf,
    source: RootSource,
}

impl WorkspaceRoot {
    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn source(&self) -> RootSource {
        self.source
    }

    pub fn state_dir(&self) -> PathBuf {
        self.path.join(STATE_DIR)
    }

    /// Express `abs` relative to the root, for journal rows and receipts.
    pub fn relativize(&self, abs: &Path) -> String {
        abs.strip_prefix(&self.path)
            .map(|p| p.to_string_lossy().into_owned())
            .unwrap_or_else(|_| abs.to_string_lossy().into_owned())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RootError {
    #[error("workspace root {0:?} is deny-listed; set RW_WORKSPACE or --workspace to a project directory")]
    DenyListed(PathBuf),
    #[error("workspace root {0:?} does not exist")]
    NotFound(PathBuf),
    #[error("workspace root {0:?} is not a directory")]
    NotADirectory(PathBuf),
    #[error("failed to canonicalize workspace root {path:?}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Directories that must never be a workspace root. The user's home
/// directory itself is denied too, but its subdirectories are fine.
pub fn deny_list() -> Vec<PathBuf> {
    let mut list: Vec<PathBuf> = [
        "/", "/etc", "/usr", "/tmp", "/var", "/bin", "/sbin", "/lib", "/boot", "/dev", "/proc",
        "/sys",
    ]
    .iter()
    .map(PathBuf::from)
    .collect();
    if let Some(home) = std::env::var_os("HOME") {
        let home = PathBuf::from(home);
        if !home.as_os_str().is_empty() {
            list.push(home);
        }
    }
    list
}

/// Resolve the workspace root at startup: `--workspace` flag, then the
/// RW_WORKSPACE environment variable, then the current working directory.
pub fn resolve_root(
    env_value: Option<&str>,
    cwd: &Path,
    cli_flag: Option<&Path>,
) -> Result<WorkspaceRoot, RootError> {
    let (candidate, source) = if let Some(flag) = cli_flag {
        (flag.to_path_buf(), RootSource::CliFlag)
    } else if let Some(env) = env_value.filter(|v| !v.trim().is_empty()) {
        (PathBuf::from(env), RootSource::Env)
    } else {
        (cwd.to_path_buf(), RootSource::Cwd)
    };

    if !candidate.exists() {
        return Err(RootError::NotFound(candidate));
    }
    let canonical = candidate.canonicalize().map_err(|source| RootError::Io {
        path: candidate.clone(),
        source,
    })?;
    if !canonical.is_dir() {
        return Err(RootError::NotADirectory(canonical));
    }

    // The deny check runs on the canonical path so a symlink to /etc is
    // caught. A root that is a parent of a denied directory is denied too.
    let denied = deny_list();
    for entry in &denied {
        let entry_canonical = entry.canonicalize().unwrap_or_else(|_| entry.clone());
        if canonical == entry_canonical || entry_canonical.starts_with(&canonical) {
            return Err(RootError::DenyListed(canonical));
        }
    }

    Ok(WorkspaceRoot {
        path: canonical,
        source,
    })
}

/// Resolve a user-supplied path to an absolute path inside the workspace.
///
/// Relative paths join against the root. `..` components and symlinks that
/// escape the root are rejected. The target itself need not exist; the
/// deepest existing ancestor is canonicalized for the symlink check.
pub fn resolve_path(root: &WorkspaceRoot, user_path: &str) -> Result<PathBuf, Failure> {
    if user_path.is_empty() {
        return Err(escape_failure(user_path, "empty path"));
    }
    let raw = Path::new(user_path);
    let joined = if raw.is_absolute() {
        raw.to_path_buf()
    } else {
        root.path().join(raw)
    };

    // Lexical normalization first: refuse to pop above the root.
    let mut normalized = PathBuf::new();
    for component in joined.components() {
        match component {
            Component::ParentDir => {
                if !normalized.pop() {
                    return Err(escape_failure(user_path, "path escapes the workspace"));
                }
            }
            Component::CurDir => {}
            other => normalized.push(other.as_os_str()),
        }
    }
    if !normalized.starts_with(root.path()) {
        return Err(escape_failure(user_path, "path escapes the workspace"));
    }

    // Symlink check: canonicalize the deepest existing ancestor and make
    // sure it is still inside the root.
    let mut existing = normalized.clone();
    let mut suffix: Vec<std::ffi::OsString> = Vec::new();
    while !existing.exists() {
        match existing.file_name() {
            Some(name) => {
                suffix.push(name.to_os_string());
                existing.pop();
            }
            None => break,
        }
    }
    let canonical_base = existing
        .canonicalize()
        .map_err(|e| escape_failure(user_path, &format!("cannot resolve path: {e}")))?;
    if !canonical_base.starts_with(root.path()) {
        return Err(escape_failure(user_path, "path escapes the workspace via a symlink"));
    }
    let mut resolved = canonical_base;
    for part in suffix.iter().rev() {
        resolved.push(part);
    }
    Ok(resolved)
}

fn escape_failure(user_path: &str, detail: &str) -> Failure {
    Failure::new(crate::envelope::ErrorKind::PolicyViolation, ReasonHint::Permission)
        .with_action("fix_path")
        .with_context("path", json!(user_path))
        .with_context("detail", json!(detail))
}

// ---------------------------------------------------------------------------
// Policy

pub const DEFAULT_THRESHOLD_HIGH: f64 = 0.70;
pub const DEFAULT_THRESHOLD_MEDIUM: f64 = 0.40;
pub const DEFAULT_THRESHOLD_LOW: f64 = 0.10;
pub const DEFAULT_RETRY_BUDGET: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictThresholds {
    pub high: f64,
    pub medium: f64,
    pub low: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            high: DEFAULT_THRESHOLD_HIGH,
            medium: DEFAULT_THRESHOLD_MEDIUM,
            low: DEFAULT_THRESHOLD_LOW,
        }
    }
}

impl VerdictThresholds {
    /// Thresholds must be strictly ordered and positive, each within (0, 1].
    pub fn is_valid(&self) -> bool {
        self.high > self.medium
            && self.medium > self.low
            && self.low > 0.0
            && self.high <= 1.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FamilyOverride {
    pub enabled: bool,
    pub weight: Option<f64>,
    pub extra_patterns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Policy {
    pub family_overrides: BTreeMap<String, FamilyOverride>,
    pub verdict_thresholds: VerdictThresholds,
    pub retry_budget_default: u32,
    pub block_on_high_risk: bool,
    pub max_write_bytes: Option<u64>,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            family_overrides: BTreeMap::new(),
            verdict_thresholds: VerdictThresholds::default(),
            retry_budget_default: DEFAULT_RETRY_BUDGET,
            block_on_high_risk: false,
            max_write_bytes: None,
        }
    }
}

/// Load `.resilient_write/policy.yaml`, overlaying the built-in defaults.
///
/// A missing file yields the defaults silently. A malformed file or an
/// invalid override yields the defaults plus warnings; policy problems never
/// block startup. Unknown keys warn and are ignored so older servers
/// tolerate newer policy files.
pub fn load_policy(root: &WorkspaceRoot) -> (Policy, Vec<String>) {
    let path = root.path().join(POLICY_RELATIVE_PATH);
    let text = match std::fs::read_to_string(&path) {
        Ok(text) => text,
        Err(_) => return (Policy::default(), Vec::new()),
    };
    parse_policy(&text)
}

pub fn parse_policy(text: &str) -> (Policy, Vec<String>) {
    let mut warnings = Vec::new();
    let doc = match yaml::parse(text) {
        Ok(doc) => doc,
        Err(e) => {
            warnings.push(format!("policy.yaml is malformed ({e}); using defaults"));
            return (Policy::default(), warnings);
        }
    };
    let mut policy = Policy::default();
    let entries = match &doc {
        Yaml::Null => return (policy, warnings),
        Yaml::Map(entries) => entries,
        _ => {
            warnings.push("policy.yaml must be a mapping; using defaults".to_string());
            return (Policy::default(), warnings);
        }
    };

    for (key, value) in entries {
        match key.as_str() {
            "families" => parse_families(value, &mut policy, &mut warnings),
            "thresholds" => parse_thresholds(value, &mut policy, &mut warnings),
            "retry_budget" => match value.as_u64() {
                Some(v) if v <= u32::MAX as u64 => policy.retry_budget_default = v as u32,
                _ => warnings.push("policy: retry_budget must be a non-negative integer; keeping default".into()),
            },
            "block_on_high_risk" => match value.as_bool() {
                Some(v) => policy.block_on_high_risk = v,
                None => warnings.push("policy: block_on_high_risk must be a boolean; keeping default".into()),
            },
            "max_write_bytes" => match value.as_u64() {
                Some(v) => policy.max_write_bytes = Some(v),
                None => warnings.push("policy: max_write_bytes must be a non-negative integer; ignoring".into()),
            },
            unknown => warnings.push(format!("policy: unknown key {unknown:?} ignored")),
        }
    }
    (policy, warnings)
}

fn parse_families(value: &Yaml, policy: &mut Policy, warnings: &mut Vec<String>) {
    let families = match value.as_map() {
        Some(map) => map,
        None => {
            warnings.push("policy: families must be a mapping; ignoring".into());
            return;
        }
    };
    for (name, overrides) in families {
        if !crate::risk::FAMILY_NAMES.contains(&name.as_str()) {
            warnings.push(format!("policy: unknown pattern family {name:?} ignored"));
            continue;
        }
        let mut family = FamilyOverride {
            enabled: true,
            ..Default::default()
        };
        let Some(fields) = overrides.as_map() else {
            warnings.push(format!("policy: family {name:?} override must be a mapping; ignoring"));
            continue;
        };
        for (field, v) in fields {
            match field.as_str() {
                "enabled" => match v.as_bool() {
                    Some(b) => family.enabled = b,
                    None => warnings.push(format!("policy: families.{name}.enabled must be a boolean")),
                },
                "weight" => match v.as_f64() {
                    Some(w) if (0.0..=1.0).contains(&w) => family.weight = Some(w),
                    _ => warnings.push(format!("policy: families.{name}.weight must be in [0, 1]; ignoring")),
                },
                "extra_patterns" => match v.as_seq() {
                    Some(items) => {
                        for item in items {
                            match item.as_str() {
                                Some(pattern) => {
                                    if regex::Regex::new(pattern).is_ok() {
                                        family.extra_patterns.push(pattern.to_string());
                                    } else {
                                        warnings.push(format!(
                                            "policy: families.{name} extra pattern {pattern:?} is not a valid regex; ignoring"
                                        ));
                                    }
                                }
                                None => warnings.push(format!(
                                    "policy: families.{name}.extra_patterns entries must be strings"
                                )),
                            }
                        }
                    }
                    None => warnings.push(format!("policy: families.{name}.extra_patterns must be a list")),
                },
                unknown => warnings.push(format!("policy: unknown key families.{name}.{unknown} ignored")),
            }
        }
        policy.family_overrides.insert(name.clone(), family);
    }
}

fn parse_thresholds(value: &Yaml, policy: &mut Policy, warnings: &mut Vec<String>) {
    let Some(fields) = value.as_map() else {
        warnings.push("policy: thresholds must be a mapping; ignoring".into());
        return;
    };
    let mut candidate = policy.verdict_thresholds;
    for (field, v) in fields {
        let Some(number) = v.as_f64() else {
            warnings.push(format!("policy: thresholds.{field} must be a number"));
            continue;
        };
        match field.as_str() {
            "high" => candidate.high = number,
            "medium" => candidate.medium = number,
            "low" => candidate.low = number,
            unknown => warnings.push(format!("policy: unknown key thresholds.{unknown} ignored")),
        }
    }
    if candidate.is_valid() {
        policy.verdict_thresholds = candidate;
    } else {
        warnings.push(format!(
            "policy: thresholds must satisfy high > medium > low > 0 (got high={}, medium={}, low={}); keeping defaults",
            candidate.high, candidate.medium, candidate.low
        ));
    }
}
