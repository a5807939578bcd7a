//! Format-aware pre-write validation.
//!
//! `rw.validate` syntax-checks a draft before it is written: LaTeX (brace
//! balance, environment matching, `\documentclass` presence), JSON (full
//! parse), Python (full syntactic parse), and YAML (the same safe subset
//! the rest of the server speaks, plus flow collections). Validation is a
//! pure function returning `{valid, format, errors[{line, message,
//! severity}]}`; it never touches the filesystem.
//!
//! The JSON grammar is implemented here rather than delegated to the
//! serialisation library so the test suite can hold it against an
//! independent reference parser.

use serde::Serialize;
use serde_json::json;

use crate::envelope::{Failure, ReasonHint};
use crate::yaml;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Latex,
    Json,
    Python,
    Yaml,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Latex => "latex",
            Format::Json => "json",
            Format::Python => "python",
            Format::Yaml => "yaml",
        }
    }

    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "latex" => Some(Format::Latex),
            "json" => Some(Format::Json),
            "python" => Some(Format::Python),
            "yaml" => Some(Format::Yaml),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub line: Option<usize>,
    pub message: String,
    pub severity: Severity,
}

impl ValidationIssue {
    fn error(line: Option<usize>, message: impl Into<String>) -> Self {
        ValidationIssue {
            line,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    fn warning(line: Option<usize>, message: impl Into<String>) -> Self {
        ValidationIssue {
            line,
            message: message.into(),
            severity: Severity::Warning,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub format: Format,
    pub errors: Vec<ValidationIssue>,
}

impl ValidationReport {
    fn from_issues(format: Format, errors: Vec<ValidationIssue>) -> Self {
        ValidationReport {
            valid: !errors.iter().any(|e| e.severity == Severity::Error),
            format,
            errors,
        }
    }
}

pub fn validate(
    content: &str,
    format: Option<Format>,
    path_hint: Option<&str>,
) -> Result<ValidationReport, Failure> {
    let format = match format {
        Some(f) => f,
        None => detect_format(content, path_hint)?,
    };
    let issues = match format {
        Format::Json => check_json(content),
        Format::Latex => check_latex(content),
        Format::Python => check_python(content),
        Format::Yaml => check_yaml(content),
    };
    Ok(ValidationReport::from_issues(format, issues))
}

/// Extension wins when a path hint is given; otherwise cheap content
/// heuristics decide. No signal at all is an error, not a guess.
pub fn detect_format(content: &str, path_hint: Option<&str>) -> Result<Format, Failure> {
    if let Some(path) = path_hint {
        let lower = path.to_ascii_lowercase();
        if let Some(ext) = lower.rsplit_once('.').map(|(_, e)| e) {
            match ext {
                "tex" => return Ok(Format::Latex),
                "json" => return Ok(Format::Json),
                "py" => return Ok(Format::Python),
                "yml" | "yaml" => return Ok(Format::Yaml),
                _ => {}
            }
        }
    }
    let trimmed = content.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(Format::Json);
    }
    if content.contains("\\documentclass") || content.contains("\\begin{") {
        return Ok(Format::Latex);
    }
    if content
        .lines()
        .any(|l| l.starts_with("def ") || l.starts_with("import ") || l.starts_with("from "))
    {
        return Ok(Format::Python);
    }
    if looks_like_yaml_mapping(content) {
        return Ok(Format::Yaml);
    }
    Err(Failure::policy(ReasonHint::Encoding, "cannot detect a format for this content")
        .with_context("path", json!(path_hint)))
}

fn looks_like_yaml_mapping(content: &str) -> bool {
    content.lines().any(|line| {
        !line.starts_with([' ', '\t', '#']) && !line.is_empty() && yaml::is_mapping_line(line)
    })
}

// ---------------------------------------------------------------------------
// JSON

fn check_json(content: &str) -> Vec<ValidationIssue> {
    match JsonParser::new(content).parse_document() {
        Ok(()) => Vec::new(),
        Err(e) => vec![ValidationIssue::error(Some(e.line), e.message)],
    }
}

struct JsonError {
    line: usize,
    message: String,
}

struct JsonParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

const JSON_MAX_DEPTH: usize = 512;

impl<'a> JsonParser<'a> {
    fn new(content: &'a str) -> Self {
        JsonParser {
            bytes: content.as_bytes(),
            pos: 0,
            line: 1,
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, JsonError> {
        Err(JsonError {
            line: self.line,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
        }
        Some(b)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')) {
            self.bump();
        }
    }

    fn parse_document(&mut self) -> Result<(), JsonError> {
        self.skip_ws();
        if self.peek().is_none() {
            return self.fail("empty input is not a JSON document");
        }
        self.parse_value(0)?;
        self.skip_ws();
        if self.peek().is_some() {
            return self.fail("trailing characters after the JSON value");
        }
        Ok(())
    }

    fn parse_value(&mut self, depth: usize) -> Result<(), JsonError> {
        if depth > JSON_MAX_DEPTH {
            return self.fail("nesting too deep");
        }
        self.skip_ws();
        match self.peek() {
            None => self.fail("unexpected end of input, expected a value"),
            Some(b'{') => self.parse_object(depth),
            Some(b'[') => self.parse_array(depth),
            Some(b'"') => self.parse_string(),
            Some(b't') => self.parse_literal("true"),
            Some(b'f') => self.parse_literal("false"),
            Some(b'n') => self.parse_literal("null"),
            Some(b'-') | Some(b'0'..=b'9') => self.parse_number(),
            Some(other) => self.fail(format!("unexpected character {:?}", other as char)),
        }
    }

    fn parse_object(&mut self, depth: usize) -> Result<(), JsonError> {
        self.bump(); // {
        self.skip_ws();
        if self.peek() == Some(b'}') {
            self.bump();
            return Ok(());
        }
        loop {
            self.skip_ws();
            if self.peek() != Some(b'"') {
                return self.fail("expected a string key in object");
            }
            self.parse_string()?;
            self.skip_ws();
            if self.peek() != Some(b':') {
                return self.fail("expected ':' after object key");
            }
            self.bump();
            self.parse_value(depth + 1)?;
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.bump();
                }
                Some(b'}') => {
                    self.bump();
                    return Ok(());
                }
                _ => return self.fail("expected ',' or '}' in object"),
            }
        }
    }

    fn parse_array(&mut self, depth: usize) -> Result<(), JsonError> {
        self.bump(); // [
        self.skip_ws();
        if self.peek() == Some(b']') {
            self.bump();
            return Ok(());
        }
        loop {
            self.parse_value(depth + 1)?;
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.bump();
                }
                Some(b']') => {
                    self.bump();
                    return Ok(());
                }
                _ => return self.fail("expected ',' or ']' in array"),
            }
        }
    }

    fn parse_string(&mut self) -> Result<(), JsonError> {
        self.bump(); // "
        loop {
            match self.bump() {
                None => return self.fail("unterminated string"),
                Some(b'"') => return Ok(()),
                Some(b'\\') => match self.bump() {
                    None => return self.fail("unterminated escape"),
                    Some(b'"') | Some(b'\\') | Some(b'/') | Some(b'b') | Some(b'f')
                    | Some(b'n') | Some(b'r') | Some(b't') => {}
                    Some(b'u') => {
                        let first = self.parse_hex4()?;
                        if (0xD800..0xDC00).contains(&first) {
                            // high surrogate must pair with a low surrogate
                            if self.bump() != Some(b'\\') || self.bump() != Some(b'u') {
                                return self.fail("unpaired surrogate escape");
                            }
                            let second = self.parse_hex4()?;
                            if !(0xDC00..0xE000).contains(&second) {
                                return self.fail("invalid low surrogate in escape pair");
                            }
                        } else if (0xDC00..0xE000).contains(&first) {
                            return self.fail("lone low surrogate escape");
                        }
                    }
                    Some(other) => {
                        return self.fail(format!("invalid escape character {:?}", other as char))
                    }
                },
                Some(b) if b < 0x20 => {
                    return self.fail("unescaped control character in string");
                }
                Some(_) => {}
            }
        }
    }

    fn parse_hex4(&mut self) -> Result<u32, JsonError> {
        let mut value = 0u32;
        for _ in 0..4 {
            let b = match self.bump() {
                Some(b) => b,
                None => return self.fail("truncated \\u escape"),
            };
            let digit = (b as char).to_digit(16);
            match digit {
                Some(d) => value = value * 16 + d,
                None => return self.fail("invalid hex digit in \\u escape"),
            }
        }
        Ok(value)
    }

    fn parse_literal(&mut self, word: &str) -> Result<(), JsonError> {
        for expected in word.bytes() {
            if self.bump() != Some(expected) {
                return self.fail(format!("invalid literal, expected {word:?}"));
            }
        }
        Ok(())
    }

    fn parse_number(&mut self) -> Result<(), JsonError> {
        if self.peek() == Some(b'-') {
            self.bump();
        }
        match self.peek() {
            Some(b'0') => {
                self.bump();
                if matches!(self.peek(), Some(b'0'..=b'9')) {
                    return self.fail("leading zeros are not allowed");
                }
            }
            Some(b'1'..=b'9') => {
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.bump();
                }
            }
            _ => return self.fail("invalid number"),
        }
        if self.peek() == Some(b'.') {
            self.bump();
            if !matches!(self.peek(), Some(b'0'..=b'9')) {
                return self.fail("expected digits after decimal point");
            }
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.bump();
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            self.bump();
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.bump();
            }
            if !matches!(self.peek(), Some(b'0'..=b'9')) {
                return self.fail("expected digits in exponent");
            }
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.bump();
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Python

fn check_python(content: &str) -> Vec<ValidationIssue> {
    match rustpython_parser::parse(content, rustpython_parser::Mode::Module, "<draft>") {
        Ok(_) => Vec::new(),
        Err(e) => {
            let offset: usize = e.offset.into();
            let line = content
                .as_bytes()
                .iter()
                .take(offset.min(content.len()))
                .filter(|&&b| b == b'\n')
                .count()
                + 1;
            vec![ValidationIssue::error(Some(line), e.error.to_string())]
        }
    }
}

// ---------------------------------------------------------------------------
// YAML

fn check_yaml(content: &str) -> Vec<ValidationIssue> {
    match yaml::parse(content) {
        Ok(_) => Vec::new(),
        Err(e) => vec![ValidationIssue::error(Some(e.line), e.message)],
    }
}

// ---------------------------------------------------------------------------
// LaTeX

/// Environments whose content is skipped wholesale.
const VERBATIM_ENVIRONMENTS: [&str; 4] = ["verbatim", "verbatim*", "lstlisting", "Verbatim"];

/// Brace balance, environment matching, and a `\documentclass` presence
/// warning. Comments (`%` to end of line), `\{`, `\}`, `\%`, `\verb`
/// arguments, and verbatim environments are excluded from the checks. This
/// is a structural screen, not a TeX engine: undefined macros and semantic
/// errors are out of scope.
fn check_latex(content: &str) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let mut brace_stack: Vec<usize> = Vec::new(); // line numbers of open braces
    let mut env_stack: Vec<(String, usize)> = Vec::new();
    let mut line = 1usize;
    let chars: Vec<char> = content.chars().collect();
    let mut i = 0;
    let mut saw_documentclass = false;

    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            '%' => {
                // comment to end of line
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '\\' => {
                if i + 1 < chars.len() && !chars[i + 1].is_ascii_alphabetic() {
                    // escaped symbol: \{ \} \% \\ etc.
                    if chars[i + 1] == '\n' {
                        line += 1;
                    }
                    i += 2;
                    continue;
                }
                let start = i + 1;
                let mut end = start;
                while end < chars.len() && chars[end].is_ascii_alphabetic() {
                    end += 1;
                }
                let command: String = chars[start..end].iter().collect();
                i = end;
                match command.as_str() {
                    "documentclass" => saw_documentclass = true,
                    "verb" => {
                        // \verb<delim>...<delim>: content is literal
                        let mut j = i;
                        if j < chars.len() && chars[j] == '*' {
                            j += 1;
                        }
                        if j < chars.len() && chars[j] != '\n' {
                            let delim = chars[j];
                            j += 1;
                            while j < chars.len() && chars[j] != delim && chars[j] != '\n' {
                                j += 1;
                            }
                            if j < chars.len() && chars[j] == delim {
                                j += 1;
                            }
                        }
                        i = j;
                    }
                    "begin" | "end" => {
                        let (name, next) = read_brace_group(&chars, i);
                        match name {
                            Some(name) => {
                                if command == "begin" {
                                    if VERBATIM_ENVIRONMENTS.contains(&name.as_str()) {
                                        // skip to the matching \end{name}
                                        let closer = format!("\\end{{{name}}}");
                                        let rest: String = chars[next..].iter().collect();
                                        match rest.find(&closer) {
                                            Some(pos) => {
                                                let skipped: &str = &rest[..pos + closer.len()];
                                                line += skipped.matches('\n').count();
                                                i = next + skipped.chars().count();
                                            }
                                            None => {
                                                issues.push(ValidationIssue::error(
                                                    Some(line),
                                                    format!("unclosed verbatim environment {name:?}"),
                                                ));
                                                i = chars.len();
                                            }
                                        }
                                    } else {
                                        env_stack.push((name, line));
                                        i = next;
                                    }
                                } else {
                                    match env_stack.pop() {
                                        Some((open_name, _)) if open_name == name => {
                                            i = next;
                                        }
                                        Some((open_name, open_line)) => {
                                            issues.push(ValidationIssue::error(
                                                Some(line),
                                                format!(
                                                    "environment mismatch: \\begin{{{open_name}}} (line {open_line}) closed by \\end{{{name}}}"
                                                ),
                                            ));
                                            i = next;
                                        }
                                        None => {
                                            issues.push(ValidationIssue::error(
                                                Some(line),
                                                format!("\\end{{{name}}} without a matching \\begin"),
                                            ));
                                            i = next;
                                        }
                                    }
                                }
                            }
                            None => {
                                issues.push(ValidationIssue::error(
                                    Some(line),
                                    format!("\\{command} is missing its {{name}} argument"),
                                ));
                            }
                        }
                    }
                    _ => {}
                }
            }
            '{' => {
                brace_stack.push(line);
                i += 1;
            }
            '}' => {
                if brace_stack.pop().is_none() {
                    issues.push(ValidationIssue::error(Some(line), "unmatched closing brace"));
                }
                i += 1;
            }
            _ => {
                i += 1;
            }
        }
    }

    for (name, open_line) in env_stack {
        issues.push(ValidationIssue::error(
            Some(open_line),
            format!("\\begin{{{name}}} is never closed"),
        ));
    }
    if let Some(open_line) = brace_stack.first() {
        issues.push(ValidationIssue::error(
            Some(*open_line),
            format!("{} unclosed brace(s)", brace_stack.len()),
        ));
    }
    if !saw_documentclass {
        issues.push(ValidationIssue::warning(
            None,
            "no \\documentclass declaration found",
        ));
    }
    issues
}

/// Read `{name}` starting at `chars[i]`; returns the name and the index
/// just past the closing brace.
fn read_brace_group(chars: &[char], i: usize) -> (Option<String>, usize) {
    if chars.get(i) != Some(&'{') {
        return (None, i);
    }
    let mut j = i + 1;
    let mut name = String::new();
    while j < chars.len() && chars[j] != '}' && chars[j] != '\n' {
        name.push(chars[j]);
        j += 1;
    }
    if chars.get(j) == Some(&'}') {
        (Some(name), j + 1)
    } else {
        (None, i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(content: &str, format: Format) -> ValidationReport {
        validate(content, Some(format), None).unwrap()
    }

    #[test]
    fn minimal_json_is_valid() {
        assert!(v("{\"a\":1}", Format::Json).valid);
        assert!(v("[1, 2.5, -3e2, null, true, \"s\"]", Format::Json).valid);
        assert!(v("\"bare string\"", Format::Json).valid);
    }

    #[test]
    fn broken_json_reports_line() {
        let report = v("{\n  \"a\": 1,\n  \"b\": }\n", Format::Json);
        assert!(!report.valid);
        assert_eq!(report.errors[0].line, Some(3));
    }

    #[test]
    fn json_rejects_trailing_garbage_and_bad_numbers() {
        assert!(!v("{} extra", Format::Json).valid);
        assert!(!v("01", Format::Json).valid);
        assert!(!v("[1,]", Format::Json).valid);
        assert!(!v("{\"a\" 1}", Format::Json).valid);
        assert!(!v("\"unterminated", Format::Json).valid);
        assert!(!v("\"bad \\q escape\"", Format::Json).valid);
        assert!(!v("", Format::Json).valid);
        assert!(!v("nul", Format::Json).valid);
    }

    #[test]
    fn json_surrogate_pairs() {
        assert!(v("\"\\ud83e\\udd80\"", Format::Json).valid);
        assert!(!v("\"\\ud83e alone\"", Format::Json).valid);
        assert!(!v("\"\\udc00 lone low\"", Format::Json).valid);
    }

    #[test]
    fn python_function_is_valid() {
        assert!(v("def f(x):\n    return x + 1\n", Format::Python).valid);
    }

    #[test]
    fn broken_python_reports_line_one() {
        let report = v("def f(:", Format::Python);
        assert!(!report.valid);
        assert_eq!(report.errors[0].line, Some(1));
    }

    #[test]
    fn python_error_line_counts_newlines() {
        let report = v("x = 1\ny = (\n", Format::Python);
        assert!(!report.valid);
        assert!(report.errors[0].line.unwrap() >= 2);
    }

    #[test]
    fn yaml_subset_is_checked() {
        assert!(v("a: 1\nb:\n  - x\n", Format::Yaml).valid);
        let report = v("a: &anchor 1\n", Format::Yaml);
        assert!(!report.valid);
        assert!(report.errors[0].message.contains("anchors"));
    }

    #[test]
    fn minimal_latex_document_is_valid() {
        let report = v(
            "\\documentclass{article}\\begin{document}x\\end{document}",
            Format::Latex,
        );
        assert!(report.valid, "{:?}", report.errors);
        assert!(report.errors.is_empty());
    }

    #[test]
    fn latex_environment_mismatch_names_both() {
        let report = v("\\begin{itemize}\\end{enumerate}", Format::Latex);
        assert!(!report.valid);
        let msg = &report.errors[0].message;
        assert!(msg.contains("itemize") && msg.contains("enumerate"), "{msg}");
    }

    #[test]
    fn latex_missing_documentclass_is_warning_not_error() {
        let report = v("\\begin{itemize}\\item x\\end{itemize}", Format::Latex);
        assert!(report.valid);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].severity, Severity::Warning);
    }

    #[test]
    fn latex_brace_imbalance_detected() {
        let report = v("\\documentclass{article}\n\\title{Unclosed\n", Format::Latex);
        assert!(!report.valid);
        assert!(report.errors[0].message.contains("unclosed brace"));
        assert_eq!(report.errors[0].line, Some(2));

        let report = v("\\documentclass{article}}\n", Format::Latex);
        assert!(!report.valid);
        assert!(report.errors[0].message.contains("unmatched closing brace"));
    }

    #[test]
    fn latex_escaped_braces_and_comments_ignored() {
        let content = "\\documentclass{article}\n\\{ not a group \\}\n% comment with { unbalanced\n\\% literal percent {ok}\n";
        let report = v(content, Format::Latex);
        assert!(report.valid, "{:?}", report.errors);
    }

    #[test]
    fn latex_verbatim_skipped_wholesale() {
        let content = "\\documentclass{article}\\begin{verbatim}\n{{{{ \\begin{fake}\n\\end{verbatim}";
        let report = v(content, Format::Latex);
        assert!(report.valid, "{:?}", report.errors);
    }

    #[test]
    fn latex_unclosed_environment_reports_begin_line() {
        let report = v("\\documentclass{article}\n\\begin{itemize}\nx\n", Format::Latex);
        assert!(!report.valid);
        assert_eq!(report.errors[0].line, Some(2));
    }

    #[test]
    fn latex_end_without_begin() {
        let report = v("\\documentclass{article}\\end{itemize}", Format::Latex);
        assert!(!report.valid);
        assert!(report.errors[0].message.contains("without a matching"));
    }

    #[test]
    fn latex_verb_argument_is_literal() {
        let report = v("\\documentclass{article}\n\\verb|{unbalanced|\n", Format::Latex);
        assert!(report.valid, "{:?}", report.errors);
    }

    #[test]
    fn detect_by_extension_wins() {
        assert_eq!(detect_format("anything", Some("doc.tex")).unwrap(), Format::Latex);
        assert_eq!(detect_format("x: 1", Some("conf.yaml")).unwrap(), Format::Yaml);
        assert_eq!(detect_format("x: 1", Some("conf.yml")).unwrap(), Format::Yaml);
        assert_eq!(detect_format("def f(): pass", Some("s.py")).unwrap(), Format::Python);
        assert_eq!(detect_format("{}", Some("d.json")).unwrap(), Format::Json);
    }

    #[test]
    fn detect_by_content_heuristics() {
        assert_eq!(detect_format("{}", None).unwrap(), Format::Json);
        assert_eq!(detect_format("  [1,2]", None).unwrap(), Format::Json);
        assert_eq!(detect_format("\\documentclass{article}", None).unwrap(), Format::Latex);
        assert_eq!(detect_format("import os\n", None).unwrap(), Format::Python);
        assert_eq!(detect_format("from x import y\n", None).unwrap(), Format::Python);
        assert_eq!(detect_format("key: value\nother: 1\n", None).unwrap(), Format::Yaml);
    }

    #[test]
    fn undetectable_content_is_an_error() {
        let failure = detect_format("plain prose with no signal", None).unwrap_err();
        assert_eq!(failure.reason_hint, ReasonHint::Encoding);
    }

    #[test]
    fn unknown_extension_falls_back_to_content() {
        assert_eq!(detect_format("{\"a\":1}", Some("notes.txt")).unwrap(), Format::Json);
    }

    #[test]
    fn validation_is_deterministic() {
        let content = "\\begin{a}\\end{b}{";
        let r1 = v(content, Format::Latex);
        let r2 = v(content, Format::Latex);
        assert_eq!(r1, r2);
    }

    #[test]
    fn valid_iff_no_error_severity() {
        let report = v("\\begin{itemize}\\item\\end{itemize}", Format::Latex);
        // only the documentclass warning
        assert!(report.valid);
        assert!(report.errors.iter().all(|e| e.severity == Severity::Warning));
    }
}
