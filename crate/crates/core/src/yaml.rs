//! Minimal YAML engine: block mappings, sequences, scalars, literal block
//! scalars, and flow collections.
//!
//! This is deliberately a safe subset. Anchors, aliases, tags, folded
//! scalars, and multi-document streams are rejected with explicit errors
//! rather than half-supported. The same engine backs handoff front matter,
//! `.resilient_write/policy.yaml`, and the YAML branch of `rw.validate`,
//! so all three agree about what "valid" means.

/// Parsed YAML value. Mappings preserve entry order and permit duplicate
/// keys (lookups take the last occurrence, matching common loaders).
#[derive(Debug, Clone, PartialEq)]
pub enum Yaml {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Seq(Vec<Yaml>),
    Map(Vec<(String, Yaml)>),
}

impl Yaml {
    pub fn get(&self, key: &str) -> Option<&Yaml> {
        match self {
            Yaml::Map(entries) => entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Yaml::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Yaml::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Yaml::Float(f) => Some(*f),
            Yaml::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Yaml::Int(i) if *i >= 0 => Some(*i as u64),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[Yaml]> {
        match self {
            Yaml::Seq(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&[(String, Yaml)]> {
        match self {
            Yaml::Map(entries) => Some(entries),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct YamlError {
    pub line: usize,
    pub message: String,
}

/// Recursion guard for block nesting and flow collections; adversarial
/// input must produce an error, never a stack overflow.
const MAX_DEPTH: usize = 128;

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, YamlError> {
    Err(YamlError {
        line,
        message: message.into(),
    })
}

/// Parse a single YAML document. An optional leading `---` line is
/// tolerated; a second document marker is an error.
pub fn parse(input: &str) -> Result<Yaml, YamlError> {
    let lines: Vec<&str> = input.split('\n').collect();
    let mut parser = Parser { lines, pos: 0 };
    parser.skip_blank();
    if let Some(raw) = parser.peek_raw() {
        if raw.trim_end() == "---" {
            parser.pos += 1;
        }
    }
    parser.skip_blank();
    if parser.peek_significant().is_none() {
        return Ok(Yaml::Null);
    }
    let indent = parser.current_indent()?;
    let value = parser.parse_block(indent, 0)?;
    parser.skip_blank();
    if let Some(raw) = parser.peek_raw() {
        let trimmed = raw.trim_end();
        if trimmed == "..." {
            parser.pos += 1;
            parser.skip_blank();
        }
        if let Some(extra) = parser.peek_significant() {
            if extra.trim_start().starts_with("---") {
                return err(parser.pos + 1, "multiple documents are not supported");
            }
            return err(parser.pos + 1, "content after the end of the document");
        }
    }
    Ok(value)
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    pos: usize, // 0-based index into lines
}

impl<'a> Parser<'a> {
    fn lineno(&self) -> usize {
        self.pos + 1
    }

    fn peek_raw(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    /// Next line that is neither blank nor a pure comment, without moving.
    fn peek_significant(&self) -> Option<&'a str> {
        self.lines[self.pos..]
            .iter()
            .copied()
            .find(|l| !is_blank_or_comment(l))
    }

    fn skip_blank(&mut self) {
        while let Some(raw) = self.peek_raw() {
            if is_blank_or_comment(raw) {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn current_indent(&self) -> Result<usize, YamlError> {
        let raw = self.peek_raw().unwrap_or("");
        indent_of(raw, self.lineno())
    }

    /// Parse the block node starting at the current line, whose first line
    /// is indented exactly `indent` columns.
    fn parse_block(&mut self, indent: usize, depth: usize) -> Result<Yaml, YamlError> {
        if depth > MAX_DEPTH {
            return err(self.lineno(), "nesting too deep");
        }
        let raw = match self.peek_raw() {
            Some(r) => r,
            None => return Ok(Yaml::Null),
        };
        let body = &raw[indent..];
        if body.starts_with("- ") || body.trim_end() == "-" {
            self.parse_sequence(indent, depth)
        } else if line_is_mapping_entry(body) {
            self.parse_mapping(indent, depth)
        } else {
            let lineno = self.lineno();
            let value = self.parse_scalar_fragment(body.trim_end(), lineno)?;
            self.pos += 1;
            self.skip_blank();
            if let Some(next) = self.peek_significant() {
                let next_indent = indent_of(next, self.lineno())?;
                if next_indent > indent {
                    return err(self.lineno(), "unexpected indentation after scalar");
                }
            }
            Ok(value)
        }
    }

    fn parse_mapping(&mut self, indent: usize, depth: usize) -> Result<Yaml, YamlError> {
        let mut entries: Vec<(String, Yaml)> = Vec::new();
        loop {
            self.skip_blank();
            let raw = match self.peek_raw() {
                Some(r) => r,
                None => break,
            };
            let line_indent = indent_of(raw, self.lineno())?;
            if line_indent < indent {
                break;
            }
            if line_indent > indent {
                return err(self.lineno(), "unexpected indentation in mapping");
            }
            let body = &raw[indent..];
            if body.starts_with("- ") || body.trim_end() == "-" {
                return err(self.lineno(), "sequence item where a mapping key was expected");
            }
            let lineno = self.lineno();
            let (key, rest) = split_key(body, lineno)?;
            let rest = strip_inline_comment(rest).trim().to_string();
            self.pos += 1;
            let value = self.parse_value_rest(&rest, indent, lineno, depth)?;
            entries.push((key, value));
            self.skip_blank();
            match self.peek_raw() {
                Some(next) => {
                    let next_indent = indent_of(next, self.lineno())?;
                    if next_indent < indent {
                        break;
                    }
                }
                None => break,
            }
        }
        Ok(Yaml::Map(entries))
    }

    fn parse_sequence(&mut self, indent: usize, depth: usize) -> Result<Yaml, YamlError> {
        let mut items = Vec::new();
        loop {
            self.skip_blank();
            let raw = match self.peek_raw() {
                Some(r) => r,
                None => break,
            };
            let line_indent = indent_of(raw, self.lineno())?;
            if line_indent != indent {
                break;
            }
            let body = &raw[indent..];
            let lineno = self.lineno();
            if body.trim_end() == "-" {
                // Item continues on the following, deeper-indented lines.
                self.pos += 1;
                self.skip_blank();
                match self.peek_significant() {
                    Some(next) if indent_of(next, self.lineno())? > indent => {
                        let child_indent = self.current_indent()?;
                        items.push(self.parse_block(child_indent, depth + 1)?);
                    }
                    _ => items.push(Yaml::Null),
                }
            } else if let Some(rest) = body.strip_prefix("- ") {
                let item_col = indent + 2 + leading_spaces(rest);
                let rest = rest.trim_start();
                if rest.starts_with("- ") || rest == "-" {
                    items.push(self.parse_inline_sequence_item(item_col, depth)?);
                } else if line_is_mapping_entry(rest) {
                    items.push(self.parse_inline_mapping_item(item_col, depth)?);
                } else {
                    let fragment = strip_inline_comment(rest).trim().to_string();
                    self.pos += 1;
                    let value = self.parse_value_rest(&fragment, indent, lineno, depth)?;
                    items.push(value);
                }
            } else {
                break;
            }
            self.skip_blank();
            match self.peek_raw() {
                Some(next) => {
                    let next_indent = indent_of(next, self.lineno())?;
                    if next_indent < indent {
                        break;
                    }
                    let next_body = &next[next_indent..];
                    if next_indent == indent && !(next_body.starts_with("- ") || next_body.trim_end() == "-") {
                        break;
                    }
                }
                None => break,
            }
        }
        Ok(Yaml::Seq(items))
    }

    /// `- key: value`: the item is a mapping whose first entry sits on the
    /// dash line and whose remaining entries are aligned under the key.
    fn parse_inline_mapping_item(&mut self, item_col: usize, depth: usize) -> Result<Yaml, YamlError> {
        let raw = self.peek_raw().expect("caller checked");
        let body = &raw[item_col..];
        let lineno = self.lineno();
        let (key, rest) = split_key(body, lineno)?;
        let rest = strip_inline_comment(rest).trim().to_string();
        self.pos += 1;
        let first_value = self.parse_value_rest(&rest, item_col, lineno, depth)?;
        let mut entries = vec![(key, first_value)];
        loop {
            self.skip_blank();
            let raw = match self.peek_raw() {
                Some(r) => r,
                None => break,
            };
            let line_indent = indent_of(raw, self.lineno())?;
            if line_indent != item_col {
                break;
            }
            let body = &raw[item_col..];
            if body.starts_with("- ") || body.trim_end() == "-" {
                break;
            }
            let lineno = self.lineno();
            let (key, rest) = split_key(body, lineno)?;
            let rest = strip_inline_comment(rest).trim().to_string();
            self.pos += 1;
            let value = self.parse_value_rest(&rest, item_col, lineno, depth)?;
            entries.push((key, value));
        }
        Ok(Yaml::Map(entries))
    }

    /// `- - a`: a nested sequence starting on the dash line.
    fn parse_inline_sequence_item(&mut self, item_col: usize, depth: usize) -> Result<Yaml, YamlError> {
        // Rewrite-free approach: treat the rest of this line as the first
        // item of a sequence whose indent is `item_col`, then continue with
        // aligned lines. Reuse parse_sequence by temporarily patching is not
        // possible on borrowed lines, so handle the simple forms directly.
        let raw = self.peek_raw().expect("caller checked");
        let body = &raw[item_col..];
        let lineno = self.lineno();
        let mut items = Vec::new();
        if let Some(rest) = body.strip_prefix("- ") {
            let fragment = strip_inline_comment(rest.trim_start()).trim().to_string();
            self.pos += 1;
            items.push(self.parse_value_rest(&fragment, item_col, lineno, depth)?);
        } else {
            // bare "-"
            self.pos += 1;
            items.push(Yaml::Null);
        }
        loop {
            self.skip_blank();
            let raw = match self.peek_raw() {
                Some(r) => r,
                None => break,
            };
            let line_indent = indent_of(raw, self.lineno())?;
            if line_indent != item_col {
                break;
            }
            let body = &raw[item_col..];
            let lineno = self.lineno();
            if let Some(rest) = body.strip_prefix("- ") {
                let fragment = strip_inline_comment(rest.trim_start()).trim().to_string();
                self.pos += 1;
                items.push(self.parse_value_rest(&fragment, item_col, lineno, depth)?);
            } else {
                break;
            }
        }
        Ok(Yaml::Seq(items))
    }

    /// Parse what follows `key:` (or a sequence dash): an inline scalar or
    /// flow value, a block-scalar header, or nothing (nested block / null).
    /// The parser position is already past the header line.
    fn parse_value_rest(
        &mut self,
        rest: &str,
        parent_indent: usize,
        header_lineno: usize,
        depth: usize,
    ) -> Result<Yaml, YamlError> {
        if rest.is_empty() {
            self.skip_blank();
            match self.peek_significant() {
                Some(next) if leading_spaces(next) > parent_indent => {
                    let child_indent = self.current_indent()?;
                    self.parse_block(child_indent, depth + 1)
                }
                // A sequence may sit at the same indent as its key.
                Some(next)
                    if leading_spaces(next) == parent_indent
                        && (next[parent_indent..].starts_with("- ")
                            || next[parent_indent..].trim_end() == "-") =>
                {
                    self.parse_sequence(parent_indent, depth + 1)
                }
                _ => Ok(Yaml::Null),
            }
        } else if rest == "|" || rest == "|-" || rest == "|+" {
            self.parse_block_literal(parent_indent, rest)
        } else if rest.starts_with('|') {
            err(
                header_lineno,
                "explicit block-scalar indentation indicators are not supported",
            )
        } else if rest.starts_with('>') {
            err(header_lineno, "folded block scalars are not supported")
        } else {
            self.parse_scalar_fragment(rest, header_lineno)
        }
    }

    /// Literal block scalar. Content is every following line indented deeper
    /// than the parent; the indentation of the first non-empty content line
    /// sets the strip column.
    fn parse_block_literal(&mut self, parent_indent: usize, header: &str) -> Result<Yaml, YamlError> {
        let mut raw_lines: Vec<&str> = Vec::new();
        let mut content_indent: Option<usize> = None;
        while let Some(raw) = self.peek_raw() {
            if raw.trim().is_empty() {
                raw_lines.push("");
                self.pos += 1;
                continue;
            }
            // Tabs are content here, not indentation, so measure spaces only.
            let line_indent = leading_spaces(raw);
            match content_indent {
                None => {
                    if line_indent <= parent_indent {
                        break;
                    }
                    content_indent = Some(line_indent);
                }
                Some(ci) => {
                    if line_indent < ci {
                        break;
                    }
                }
            }
            raw_lines.push(raw);
            self.pos += 1;
        }
        // Trailing blank lines beyond the block belong to the document, not
        // the scalar, unless the + chomping indicator asks for them.
        let ci = content_indent.unwrap_or(parent_indent + 1);
        let mut trailing_blank = 0;
        while trailing_blank < raw_lines.len() && raw_lines[raw_lines.len() - 1 - trailing_blank].is_empty() {
            trailing_blank += 1;
        }
        let kept = &raw_lines[..raw_lines.len() - trailing_blank];
        let mut text = String::new();
        for line in kept {
            if line.is_empty() {
                text.push('\n');
            } else {
                text.push_str(&line[ci.min(line.len())..]);
                text.push('\n');
            }
        }
        match header {
            "|" => {
                // clip: exactly one trailing newline (already the case unless empty)
                if kept.is_empty() {
                    text.clear();
                }
            }
            "|-" => {
                while text.ends_with('\n') {
                    text.pop();
                }
            }
            "|+" => {
                for _ in 0..trailing_blank {
                    text.push('\n');
                }
            }
            _ => unreachable!(),
        }
        Ok(Yaml::Str(text))
    }

    fn parse_scalar_fragment(&self, fragment: &str, lineno: usize) -> Result<Yaml, YamlError> {
        let mut flow = FlowParser {
            chars: fragment.char_indices().collect(),
            pos: 0,
            src: fragment,
            lineno,
            flow_depth: 0,
        };
        let value = flow.parse_value(true)?;
        flow.skip_ws();
        if flow.pos < flow.chars.len() {
            return err(lineno, format!("unexpected trailing characters: {:?}", &fragment[flow.byte_pos()..]));
        }
        Ok(value)
    }
}

// ---------------------------------------------------------------------------
// Flow / scalar parsing

struct FlowParser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
    lineno: usize,
    flow_depth: usize,
}

impl<'a> FlowParser<'a> {
    fn byte_pos(&self) -> usize {
        self.chars.get(self.pos).map(|(b, _)| *b).unwrap_or(self.src.len())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ') | Some('\t')) {
            self.pos += 1;
        }
    }

    /// `top_level`: plain scalars may contain `,`, `[`, `]`, `{`, `}` when we
    /// are not inside a flow collection.
    fn parse_value(&mut self, top_level: bool) -> Result<Yaml, YamlError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(Yaml::Null),
            Some('{') => self.parse_flow_map(),
            Some('[') => self.parse_flow_seq(),
            Some('"') => Ok(Yaml::Str(self.parse_double_quoted()?)),
            Some('\'') => Ok(Yaml::Str(self.parse_single_quoted()?)),
            Some('&') => err(self.lineno, "anchors are not supported"),
            Some('*') => err(self.lineno, "aliases are not supported"),
            Some('!') => err(self.lineno, "tags are not supported"),
            Some(_) => self.parse_plain(top_level),
        }
    }

    fn parse_flow_map(&mut self) -> Result<Yaml, YamlError> {
        self.flow_depth += 1;
        if self.flow_depth > MAX_DEPTH {
            return err(self.lineno, "nesting too deep");
        }
        self.bump(); // {
        let mut entries = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('}') => {
                    self.bump();
                    break;
                }
                None => return err(self.lineno, "unterminated flow mapping"),
                _ => {}
            }
            let key = match self.peek() {
                Some('"') => self.parse_double_quoted()?,
                Some('\'') => self.parse_single_quoted()?,
                _ => {
                    let v = self.parse_plain_until(&[':', ',', '}'])?;
                    match v {
                        Yaml::Str(s) => s,
                        other => plain_to_key(other),
                    }
                }
            };
            self.skip_ws();
            let value = if self.peek() == Some(':') {
                self.bump();
                self.skip_ws();
                match self.peek() {
                    Some(',') | Some('}') => Yaml::Null,
                    _ => self.parse_value(false)?,
                }
            } else {
                Yaml::Null
            };
            entries.push((key, value));
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some('}') => {
                    self.bump();
                    break;
                }
                _ => return err(self.lineno, "expected ',' or '}' in flow mapping"),
            }
        }
        self.flow_depth -= 1;
        Ok(Yaml::Map(entries))
    }

    fn parse_flow_seq(&mut self) -> Result<Yaml, YamlError> {
        self.flow_depth += 1;
        if self.flow_depth > MAX_DEPTH {
            return err(self.lineno, "nesting too deep");
        }
        self.bump(); // [
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(']') => {
                    self.bump();
                    break;
                }
                None => return err(self.lineno, "unterminated flow sequence"),
                _ => {}
            }
            items.push(self.parse_value(false)?);
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(']') => {
                    self.bump();
                    break;
                }
                _ => return err(self.lineno, "expected ',' or ']' in flow sequence"),
            }
        }
        self.flow_depth -= 1;
        Ok(Yaml::Seq(items))
    }

    fn parse_double_quoted(&mut self) -> Result<String, YamlError> {
        self.bump(); // "
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return err(self.lineno, "unterminated double-quoted string"),
                Some('"') => break,
                Some('\\') => {
                    let escaped = self.bump().ok_or(YamlError {
                        line: self.lineno,
                        message: "dangling escape at end of string".into(),
                    })?;
                    match escaped {
                        'n' => out.push('\n'),
                        't' => out.push('\t'),
                        'r' => out.push('\r'),
                        '0' => out.push('\0'),
                        '"' => out.push('"'),
                        '\\' => out.push('\\'),
                        '/' => out.push('/'),
                        'x' => out.push(self.parse_hex_escape(2)?),
                        'u' => out.push(self.parse_hex_escape(4)?),
                        'U' => out.push(self.parse_hex_escape(8)?),
                        other => {
                            return err(self.lineno, format!("unsupported escape \\{other}"));
                        }
                    }
                }
                Some(c) => out.push(c),
            }
        }
        Ok(out)
    }

    fn parse_hex_escape(&mut self, digits: usize) -> Result<char, YamlError> {
        let mut code: u32 = 0;
        for _ in 0..digits {
            let c = self.bump().ok_or(YamlError {
                line: self.lineno,
                message: "truncated hex escape".into(),
            })?;
            let d = c.to_digit(16).ok_or(YamlError {
                line: self.lineno,
                message: format!("invalid hex digit {c:?} in escape"),
            })?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or(YamlError {
            line: self.lineno,
            message: format!("escape U+{code:04X} is not a valid character"),
        })
    }

    fn parse_single_quoted(&mut self) -> Result<String, YamlError> {
        self.bump(); // '
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return err(self.lineno, "unterminated single-quoted string"),
                Some('\'') => {
                    if self.peek() == Some('\'') {
                        self.bump();
                        out.push('\'');
                    } else {
                        break;
                    }
                }
                Some(c) => out.push(c),
            }
        }
        Ok(out)
    }

    fn parse_plain(&mut self, top_level: bool) -> Result<Yaml, YamlError> {
        if top_level {
            let start = self.byte_pos();
            let text = self.src[start..].trim_end();
            if find_mapping_colon(text).is_some() {
                return err(self.lineno, "mapping values are not allowed in this context");
            }
            if text == "-" || text.starts_with("- ") {
                return err(self.lineno, "sequence entries are not allowed in this context");
            }
            self.pos = self.chars.len();
            Ok(infer_scalar(text))
        } else {
            self.parse_plain_until(&[',', ']', '}'])
        }
    }

    fn parse_plain_until(&mut self, stops: &[char]) -> Result<Yaml, YamlError> {
        let start = self.byte_pos();
        while let Some(c) = self.peek() {
            if stops.contains(&c) {
                break;
            }
            if c == '[' || c == '{' {
                return err(self.lineno, "unexpected flow collection inside plain scalar");
            }
            self.pos += 1;
        }
        let text = self.src[start..self.byte_pos()].trim();
        if text.is_empty() {
            return err(self.lineno, "empty scalar in flow collection");
        }
        if text.starts_with('&') {
            return err(self.lineno, "anchors are not supported");
        }
        if text.starts_with('*') {
            return err(self.lineno, "aliases are not supported");
        }
        if text.starts_with('!') {
            return err(self.lineno, "tags are not supported");
        }
        Ok(infer_scalar(text))
    }
}

fn plain_to_key(value: Yaml) -> String {
    match value {
        Yaml::Str(s) => s,
        Yaml::Null => "null".to_string(),
        Yaml::Bool(b) => b.to_string(),
        Yaml::Int(i) => i.to_string(),
        Yaml::Float(f) => format!("{f:?}"),
        _ => String::new(),
    }
}

/// Resolve an unquoted scalar to null / bool / int / float / string.
fn infer_scalar(text: &str) -> Yaml {
    match text {
        "" | "~" | "null" | "Null" | "NULL" => return Yaml::Null,
        "true" | "True" | "TRUE" => return Yaml::Bool(true),
        "false" | "False" | "FALSE" => return Yaml::Bool(false),
        _ => {}
    }
    if looks_like_int(text) {
        if let Ok(i) = text.parse::<i64>() {
            return Yaml::Int(i);
        }
    }
    if looks_like_float(text) {
        if let Ok(f) = text.parse::<f64>() {
            return Yaml::Float(f);
        }
    }
    Yaml::Str(text.to_string())
}

fn looks_like_int(text: &str) -> bool {
    let digits = text.strip_prefix(['+', '-']).unwrap_or(text);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn looks_like_float(text: &str) -> bool {
    let body = text.strip_prefix(['+', '-']).unwrap_or(text);
    if body.is_empty() {
        return false;
    }
    let (mantissa, exponent) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, Some(e)),
        None => (body, None),
    };
    if let Some(e) = exponent {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        if e.is_empty() || !e.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
    }
    let has_dot = mantissa.contains('.');
    if !has_dot && exponent.is_none() {
        return false;
    }
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return false;
    }
    int_part.bytes().all(|b| b.is_ascii_digit()) && frac_part.bytes().all(|b| b.is_ascii_digit())
}

// ---------------------------------------------------------------------------
// Line helpers

fn is_blank_or_comment(line: &str) -> bool {
    let trimmed = line.trim_start();
    trimmed.is_empty() || trimmed.starts_with('#')
}

fn leading_spaces(s: &str) -> usize {
    s.len() - s.trim_start_matches(' ').len()
}

fn indent_of(line: &str, lineno: usize) -> Result<usize, YamlError> {
    let spaces = leading_spaces(line);
    if line[spaces..].starts_with('\t') {
        return err(lineno, "tabs are not allowed in indentation");
    }
    Ok(spaces)
}

/// Does this line fragment start a `key: value` mapping entry?
fn line_is_mapping_entry(body: &str) -> bool {
    split_key(body, 0).is_ok()
}

/// Format-detection probe: does this line look like a mapping entry?
pub fn is_mapping_line(line: &str) -> bool {
    line_is_mapping_entry(line)
}

/// Split `key: rest` (or `key:` at end of line). The key may be plain or
/// quoted; a colon inside a plain key must be followed by a space to count.
fn split_key(body: &str, lineno: usize) -> Result<(String, &str), YamlError> {
    let body_trimmed = body.trim_end();
    if body_trimmed.starts_with('"') {
        // Quoted keys decode exactly like quoted values.
        let mut flow = FlowParser {
            chars: body_trimmed.char_indices().collect(),
            pos: 0,
            src: body_trimmed,
            lineno,
            flow_depth: 0,
        };
        let key = flow.parse_double_quoted()?;
        let after = body_trimmed[flow.byte_pos()..].trim_start();
        let rest = after.strip_prefix(':').ok_or(YamlError {
            line: lineno,
            message: "expected ':' after quoted key".into(),
        })?;
        if !rest.is_empty() && !rest.starts_with(' ') {
            return err(lineno, "expected space after ':'");
        }
        return Ok((key, rest.trim_start_matches(' ')));
    }
    if let Some(stripped) = body_trimmed.strip_prefix('\'') {
        let end = stripped.find('\'').ok_or(YamlError {
            line: lineno,
            message: "unterminated quoted key".into(),
        })?;
        let key = stripped[..end].to_string();
        let after = stripped[end + 1..].trim_start();
        let rest = after.strip_prefix(':').ok_or(YamlError {
            line: lineno,
            message: "expected ':' after quoted key".into(),
        })?;
        if !rest.is_empty() && !rest.starts_with(' ') {
            return err(lineno, "expected space after ':'");
        }
        return Ok((key, rest.trim_start_matches(' ')));
    }
    match find_mapping_colon(body_trimmed) {
        Some(idx) => {
            let key = body_trimmed[..idx].trim_end();
            if key.is_empty() {
                return err(lineno, "empty mapping key");
            }
            if key.starts_with(['&', '*', '!', '?']) {
                return err(lineno, "unsupported key form (anchors, aliases, tags, complex keys)");
            }
            let rest = &body_trimmed[idx + 1..];
            Ok((key.to_string(), rest.trim_start_matches(' ')))
        }
        None => err(lineno, "expected 'key: value'"),
    }
}

/// Index of the first colon that terminates a plain key: followed by a
/// space or at end of line, and outside any quotes.
fn find_mapping_colon(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b':' => {
                if i + 1 == bytes.len() || bytes[i + 1] == b' ' {
                    return Some(i);
                }
                i += 1;
            }
            b'"' | b'\'' => return None, // quotes mid-key: not a plain entry
            _ => i += 1,
        }
    }
    None
}

/// Strip a trailing ` # comment` from a non-block fragment, respecting
/// quotes: a `#` only begins a comment when preceded by whitespace (or at
/// the start) and outside quoted text.
fn strip_inline_comment(fragment: &str) -> &str {
    let bytes = fragment.as_bytes();
    let mut in_double = false;
    let mut in_single = false;
    let mut escaped = false;
    for i in 0..bytes.len() {
        let b = bytes[i];
        if in_double {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_double = false;
            }
            continue;
        }
        if in_single {
            if b == b'\'' {
                in_single = false;
            }
            continue;
        }
        match b {
            b'"' => in_double = true,
            b'\'' => in_single = true,
            b'#' if i == 0 || bytes[i - 1] == b' ' || bytes[i - 1] == b'\t' => {
                return &fragment[..i];
            }
            _ => {}
        }
    }
    fragment
}

// ---------------------------------------------------------------------------
// Emitter

/// Serialise a value so that `parse(emit(v)) == v`.
pub fn emit(value: &Yaml) -> String {
    let mut out = String::new();
    emit_block(value, 0, &mut out);
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out
}

fn emit_block(value: &Yaml, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match value {
        Yaml::Map(entries) if !entries.is_empty() => {
            for (key, v) in entries {
                out.push_str(&pad);
                out.push_str(&key_repr(key));
                out.push(':');
                emit_entry_value(v, indent, out);
            }
        }
        Yaml::Seq(items) if !items.is_empty() => {
            for item in items {
                out.push_str(&pad);
                out.push('-');
                match item {
                    Yaml::Map(entries) if !entries.is_empty() => {
                        // First entry shares the dash line.
                        let mut first = true;
                        for (key, v) in entries {
                            if first {
                                out.push(' ');
                                first = false;
                            } else {
                                out.push_str(&pad);
                                out.push_str("  ");
                            }
                            out.push_str(&key_repr(key));
                            out.push(':');
                            emit_entry_value(v, indent + 2, out);
                        }
                    }
                    Yaml::Seq(inner) if !inner.is_empty() => {
                        out.push('\n');
                        emit_block(item, indent + 2, out);
                        let _ = inner;
                    }
                    other => {
                        out.push(' ');
                        out.push_str(&scalar_repr(other));
                        out.push('\n');
                    }
                }
            }
        }
        other => {
            out.push_str(&pad);
            out.push_str(&scalar_repr(other));
            out.push('\n');
        }
    }
}

/// Emit the value part of a `key:` entry (shared by mappings and inline
/// mapping items): scalar on the same line, block scalar, or nested block.
fn emit_entry_value(v: &Yaml, indent: usize, out: &mut String) {
    match v {
        Yaml::Map(entries) if !entries.is_empty() => {
            out.push('\n');
            emit_block(v, indent + 2, out);
            let _ = entries;
        }
        Yaml::Seq(items) if !items.is_empty() => {
            out.push('\n');
            emit_block(v, indent + 2, out);
            let _ = items;
        }
        Yaml::Str(s) if block_scalar_safe(s) => {
            let (header, body) = block_scalar_form(s);
            out.push(' ');
            out.push_str(header);
            out.push('\n');
            let pad = " ".repeat(indent + 2);
            for line in body {
                if line.is_empty() {
                    out.push('\n');
                } else {
                    out.push_str(&pad);
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
        other => {
            out.push(' ');
            out.push_str(&scalar_repr(other));
            out.push('\n');
        }
    }
}

/// A string goes out as a literal block scalar only when that is loss-free:
/// multi-line, no line with leading or trailing blanks, non-empty first
/// line, and at most one trailing newline.
fn block_scalar_safe(s: &str) -> bool {
    if !s.contains('\n') {
        return false;
    }
    if s.ends_with("\n\n") {
        return false;
    }
    let body = s.strip_suffix('\n').unwrap_or(s);
    let mut first = true;
    for line in body.split('\n') {
        if first {
            if line.is_empty() || line.starts_with(' ') || line.starts_with('\t') {
                return false;
            }
            first = false;
        } else if !line.is_empty() && (line.starts_with(' ') || line.starts_with('\t')) {
            return false;
        }
        if line.ends_with(' ') || line.ends_with('\t') {
            return false;
        }
        if line.chars().any(|c| c.is_control() && c != '\t') {
            return false;
        }
    }
    true
}

fn block_scalar_form(s: &str) -> (&'static str, Vec<&str>) {
    if let Some(body) = s.strip_suffix('\n') {
        ("|", body.split('\n').collect())
    } else {
        ("|-", s.split('\n').collect())
    }
}

fn key_repr(key: &str) -> String {
    if plain_safe(key) {
        key.to_string()
    } else {
        quote_double(key)
    }
}

fn scalar_repr(value: &Yaml) -> String {
    match value {
        Yaml::Null => "null".to_string(),
        Yaml::Bool(b) => b.to_string(),
        Yaml::Int(i) => i.to_string(),
        Yaml::Float(f) => {
            let repr = format!("{f:?}");
            debug_assert!(looks_like_float(&repr) || looks_like_int(&repr));
            repr
        }
        Yaml::Str(s) => {
            if plain_safe(s) {
                s.clone()
            } else {
                quote_double(s)
            }
        }
        Yaml::Seq(items) => {
            debug_assert!(items.is_empty());
            "[]".to_string()
        }
        Yaml::Map(entries) => {
            debug_assert!(entries.is_empty());
            "{}".to_string()
        }
    }
}

/// Conservative: a plain scalar must survive re-parsing as the same string.
/// The charset excludes `#` and `:` outright, so internal spaces are safe.
fn plain_safe(s: &str) -> bool {
    if s.is_empty() || s.len() > 512 {
        return false;
    }
    if !s.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-' | b'/' | b' ')) {
        return false;
    }
    if s.starts_with(' ') || s.ends_with(' ') || s == "-" || s.starts_with("- ") {
        return false;
    }
    matches!(infer_scalar(s), Yaml::Str(_))
}

fn quote_double(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
