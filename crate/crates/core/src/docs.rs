//! Documentation consistency checks.
//!
//! Docs drift is a bug: every `rw.*` tool named anywhere in the shipped
//! Markdown must exist in the live catalog, and every fenced JSON example
//! must parse (error-envelope examples must additionally satisfy the
//! published envelope schema). Wired into the test suite so it runs in CI.

use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use regex::Regex;
use serde_json::Value;

use crate::schema::validate_value;

#[derive(Debug, Clone)]
pub struct DocsIssue {
    pub file: String,
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for DocsIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

static TOOL_REFERENCE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\brw\.[a-z_]+").expect("tool reference pattern compiles"));

/// Check every `.md` file under `docs_dir`. `envelope_schema` (when given)
/// is applied to fenced JSON examples that carry `"ok": false`.
pub fn check_docs(
    docs_dir: &Path,
    catalog_names: &[String],
    envelope_schema: Option<&Value>,
) -> Result<(), Vec<DocsIssue>> {
    let mut issues = Vec::new();
    for file in markdown_files(docs_dir) {
        let display = file
            .strip_prefix(docs_dir)
            .unwrap_or(&file)
            .to_string_lossy()
            .into_owned();
        let Ok(text) = std::fs::read_to_string(&file) else {
            issues.push(DocsIssue {
                file: display,
                line: 0,
                message: "unreadable file".into(),
            });
            continue;
        };
        check_file(&display, &text, catalog_names, envelope_schema, &mut issues);
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

fn markdown_files(dir: &Path) -> Vec<PathBuf> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(current) = stack.pop() {
        let Ok(entries) = std::fs::read_dir(&current) else { continue };
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().map(|e| e == "md").unwrap_or(false) {
                files.push(path);
            }
        }
    }
    files.sort();
    files
}

fn check_file(
    file: &str,
    text: &str,
    catalog_names: &[String],
    envelope_schema: Option<&Value>,
    issues: &mut Vec<DocsIssue>,
) {
    let mut json_block: Option<(usize, String)> = None;
    let mut in_other_fence = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim_start();
        if let Some((start_line, body)) = json_block.as_mut() {
            if trimmed.starts_with("```") {
                check_json_example(file, *start_line, body, envelope_schema, issues);
                json_block = None;
            } else {
                body.push_str(line);
                body.push('\n');
            }
            continue;
        }
        if in_other_fence {
            if trimmed.starts_with("```") {
                in_other_fence = false;
            }
            continue;
        }
        if let Some(lang) = trimmed.strip_prefix("```") {
            if lang.trim() == "json" {
                json_block = Some((lineno, String::new()));
            } else {
                in_other_fence = true;
            }
            continue;
        }
        for m in TOOL_REFERENCE.find_iter(line) {
            let name = m.as_str();
            if !catalog_names.iter().any(|n| n == name) {
                issues.push(DocsIssue {
                    file: file.to_string(),
                    line: lineno,
                    message: format!("references unknown tool {name:?}"),
                });
            }
        }
    }
    if let Some((start_line, _)) = json_block {
        issues.push(DocsIssue {
            file: file.to_string(),
            line: start_line,
            message: "unterminated ```json fence".into(),
        });
    }
}

fn check_json_example(
    file: &str,
    line: usize,
    body: &str,
    envelope_schema: Option<&Value>,
    issues: &mut Vec<DocsIssue>,
) {
    let value: Value = match serde_json::from_str(body) {
        Ok(v) => v,
        Err(e) => {
            issues.push(DocsIssue {
                file: file.to_string(),
                line,
                message: format!("JSON example does not parse: {e}"),
            });
            return;
        }
    };
    if value.get("ok") == Some(&Value::Bool(false)) {
        if let Some(schema) = envelope_schema {
            for error in validate_value(schema, &value) {
                issues.push(DocsIssue {
                    file: file.to_string(),
                    line,
                    message: format!("error-envelope example violates the schema: {error}"),
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        crate::transport::build_catalog()
            .iter()
            .map(|t| t.name.clone())
            .collect()
    }

    #[test]
    fn intact_docs_pass() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("guide.md"),
            "Use rw.safe_write for writes.\n\n```json\n{\"ok\": true}\n```\n",
        )
        .unwrap();
        assert!(check_docs(dir.path(), &names(), None).is_ok());
    }

    #[test]
    fn dangling_tool_reference_fails_with_location() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("guide.md"), "line one\ncall rw.nonexistent here\n").unwrap();
        let issues = check_docs(dir.path(), &names(), None).unwrap_err();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].line, 2);
        assert!(issues[0].message.contains("rw.nonexistent"));
    }

    #[test]
    fn broken_json_example_fails() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("guide.md"), "```json\n{broken\n```\n").unwrap();
        let issues = check_docs(dir.path(), &names(), None).unwrap_err();
        assert!(issues[0].message.contains("does not parse"));
    }

    #[test]
    fn envelope_example_is_schema_checked() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("guide.md"),
            "```json\n{\"ok\": false, \"error\": \"not_a_kind\"}\n```\n",
        )
        .unwrap();
        let schema = serde_json::json!({
            "type": "object",
            "required": ["error", "reason_hint"],
            "properties": {"error": {"enum": ["blocked"]}}
        });
        let issues = check_docs(dir.path(), &names(), Some(&schema)).unwrap_err();
        assert!(!issues.is_empty());
    }

    #[test]
    fn non_json_fences_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("guide.md"),
            "```bash\nrw.this_is_not_rust code sample\n```\n",
        )
        .unwrap();
        assert!(check_docs(dir.path(), &names(), None).is_ok());
    }
}
