//! Reading and writing the raw `.cgel` file format.
//!
//! A file is a sequence of entries. Each entry is a block of `# key = value`
//! header lines followed by one parenthesized tree:
//!
//! ```text
//! # sent = stop
//! (Clause
//!     :Head (VP
//!         :Head (V :t "stop")))
//! ```
//!
//! Every line of the tree starts a constituent. A constituent is a category
//! token, optionally preceded by a coindexation variable and `/`, followed by
//! its string-valued features and then its function-tagged children.

use std::fmt;

use thiserror::Error;

/// Guard against stack exhaustion on adversarial input.
pub const MAX_DEPTH: usize = 256;

/// A 1-based line/column position plus the byte offset into the input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl Pos {
    pub const START: Pos = Pos {
        line: 1,
        column: 1,
        offset: 0,
    };
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKey {
    /// Original token.
    T,
    /// Punctuation token.
    P,
    /// Subtoken.
    Subt,
    /// Corrected form.
    Correct,
    /// Lemma.
    L,
    /// Free-text comment.
    Note,
}

impl FeatureKey {
    pub const ALL: [FeatureKey; 6] = [
        FeatureKey::T,
        FeatureKey::P,
        FeatureKey::Subt,
        FeatureKey::Correct,
        FeatureKey::L,
        FeatureKey::Note,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKey::T => "t",
            FeatureKey::P => "p",
            FeatureKey::Subt => "subt",
            FeatureKey::Correct => "correct",
            FeatureKey::L => "l",
            FeatureKey::Note => "note",
        }
    }

    pub fn from_name(name: &str) -> Option<FeatureKey> {
        FeatureKey::ALL.into_iter().find(|k| k.as_str() == name)
    }
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Feature {
    pub key: FeatureKey,
    pub value: String,
}

impl Feature {
    pub fn new(key: FeatureKey, value: impl Into<String>) -> Self {
        Feature {
            key,
            value: value.into(),
        }
    }
}

/// A function-tagged child edge.
#[derive(Debug, Clone)]
pub struct RawChild {
    pub function: String,
    pub node: RawNode,
}

/// One constituent exactly as written.
#[derive(Debug, Clone)]
pub struct RawNode {
    pub category: String,
    pub coindex_var: Option<String>,
    pub features: Vec<Feature>,
    pub children: Vec<RawChild>,
    pub span: Span,
}

impl RawNode {
    pub fn new(category: impl Into<String>) -> Self {
        RawNode {
            category: category.into(),
            coindex_var: None,
            features: Vec::new(),
            children: Vec::new(),
            span: Span::default(),
        }
    }

    pub fn with_var(mut self, var: impl Into<String>) -> Self {
        self.coindex_var = Some(var.into());
        self
    }

    pub fn with_feature(mut self, key: FeatureKey, value: impl Into<String>) -> Self {
        self.features.push(Feature::new(key, value));
        self
    }

    pub fn with_child(mut self, function: impl Into<String>, node: RawNode) -> Self {
        self.children.push(RawChild {
            function: function.into(),
            node,
        });
        self
    }

    /// First value of `key`, if any.
    pub fn feature(&self, key: FeatureKey) -> Option<&str> {
        self.features
            .iter()
            .find(|f| f.key == key)
            .map(|f| f.value.as_str())
    }

    /// Equality ignoring source positions.
    pub fn structurally_eq(&self, other: &RawNode) -> bool {
        self.category == other.category
            && self.coindex_var == other.coindex_var
            && self.features == other.features
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(&other.children)
                .all(|(a, b)| a.function == b.function && a.node.structurally_eq(&b.node))
    }

    /// Number of constituents in this subtree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.node.size()).sum::<usize>()
    }
}

/// One entry of a `.cgel` file: header lines plus the tree.
#[derive(Debug, Clone)]
pub struct SourceTree {
    pub headers: Vec<(String, String)>,
    pub root: RawNode,
    pub span: Span,
    original: Option<String>,
}

impl SourceTree {
    pub fn new(headers: Vec<(String, String)>, root: RawNode) -> Self {
        SourceTree {
            headers,
            root,
            span: Span::default(),
            original: None,
        }
    }

    pub fn header(&self, key: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// The entry's source text as it appeared in the input, when parsed.
    pub fn original_text(&self) -> Option<&str> {
        self.original.as_deref()
    }

    pub fn structurally_eq(&self, other: &SourceTree) -> bool {
        self.headers == other.headers && self.root.structurally_eq(&other.root)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unbalanced parenthesis")]
    UnbalancedParenthesis,
    #[error("unterminated string")]
    UnterminatedString,
    #[error("invalid escape `\\{0}` (only `\\\"` and `\\\\` are allowed)")]
    InvalidEscape(char),
    #[error("feature key `{0}` is not one of t, p, subt, correct, l, note")]
    UnknownFeatureKey(String),
    #[error("`/` without preceding variable")]
    SlashWithoutVariable,
    #[error("invalid coindexation variable `{0}`")]
    InvalidVariable(String),
    #[error("missing category")]
    MissingCategory,
    #[error("missing function or feature name after `:`")]
    MissingName,
    #[error("feature `{0}` follows a child constituent")]
    FeatureAfterChild(String),
    #[error("constituent without a function")]
    ChildWithoutFunction,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("junk between trees")]
    JunkBetweenTrees,
    #[error("header block without a tree")]
    HeaderWithoutTree,
    #[error("malformed header line (expected `# key = value`)")]
    MalformedHeader,
    #[error("expected a constituent")]
    ExpectedNode,
    #[error("nesting deeper than {MAX_DEPTH} constituents")]
    TooDeep,
    #[error("invalid UTF-8")]
    InvalidUtf8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {pos}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
}

impl ParseError {
    fn new(kind: ParseErrorKind, pos: Pos) -> Self {
        ParseError { kind, pos }
    }
}

type Result<T> = std::result::Result<T, ParseError>;

/// Parse every entry of a `.cgel` file.
pub fn parse_corpus(text: &str) -> Result<Vec<SourceTree>> {
    let mut parser = Parser::new(text);
    let mut trees = Vec::new();
    loop {
        parser.skip_ws();
        let Some(c) = parser.peek() else { break };
        match c {
            '#' | '(' => trees.push(parser.entry()?),
            ')' => {
                return Err(ParseError::new(
                    ParseErrorKind::UnbalancedParenthesis,
                    parser.pos,
                ))
            }
            _ => {
                return Err(ParseError::new(
                    ParseErrorKind::JunkBetweenTrees,
                    parser.pos,
                ))
            }
        }
    }
    Ok(trees)
}

/// Like [`parse_corpus`], but accepts arbitrary bytes.
pub fn parse_corpus_bytes(bytes: &[u8]) -> Result<Vec<SourceTree>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_corpus(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let mut parser = Parser::new(valid);
            while parser.bump().is_some() {}
            Err(ParseError::new(ParseErrorKind::InvalidUtf8, parser.pos))
        }
    }
}

/// Parse a single parenthesized constituent.
pub fn parse_node(text: &str) -> Result<RawNode> {
    let mut parser = Parser::new(text);
    parser.skip_ws();
    if parser.peek() != Some('(') {
        return Err(ParseError::new(ParseErrorKind::ExpectedNode, parser.pos));
    }
    let node = parser.node(0)?;
    parser.skip_ws();
    match parser.peek() {
        None => Ok(node),
        Some(')') => Err(ParseError::new(
            ParseErrorKind::UnbalancedParenthesis,
            parser.pos,
        )),
        Some(_) => Err(ParseError::new(
            ParseErrorKind::JunkBetweenTrees,
            parser.pos,
        )),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: Pos,
}

fn is_word_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '(' | ')' | ':' | '"' | '/'))
}

fn is_name_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '(' | ')' | ':' | '"'))
}

pub(crate) fn is_valid_variable(var: &str) -> bool {
    let mut chars = var.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: Pos::START,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos.offset..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos.offset += c.len_utf8();
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos.offset;
        while matches!(self.peek(), Some(c) if pred(c)) {
            self.bump();
        }
        &self.src[start..self.pos.offset]
    }

    fn entry(&mut self) -> Result<SourceTree> {
        let start = self.pos;
        let mut headers = Vec::new();
        while self.peek() == Some('#') {
            headers.push(self.header_line()?);
            self.skip_ws();
        }
        match self.peek() {
            Some('(') => {}
            None => return Err(ParseError::new(ParseErrorKind::HeaderWithoutTree, start)),
            Some(_) => {
                return Err(ParseError::new(
                    ParseErrorKind::JunkBetweenTrees,
                    self.pos,
                ))
            }
        }
        let root = self.node(0)?;
        let end = self.pos;
        // Only whitespace may follow a tree on its closing line.
        self.take_while(|c| c != '\n' && c.is_whitespace());
        if let Some(c) = self.peek() {
            if c != '\n' {
                let kind = if c == ')' {
                    ParseErrorKind::UnbalancedParenthesis
                } else {
                    ParseErrorKind::JunkBetweenTrees
                };
                return Err(ParseError::new(kind, self.pos));
            }
        }
        Ok(SourceTree {
            headers,
            root,
            span: Span { start, end },
            original: Some(self.src[start.offset..end.offset].to_string()),
        })
    }

    fn header_line(&mut self) -> Result<(String, String)> {
        let start = self.pos;
        self.bump(); // '#'
        let line = self.take_while(|c| c != '\n');
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::new(ParseErrorKind::MalformedHeader, start));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ParseError::new(ParseErrorKind::MalformedHeader, start));
        }
        Ok((key.to_string(), value.trim().to_string()))
    }

    fn node(&mut self, depth: usize) -> Result<RawNode> {
        let open = self.pos;
        if depth >= MAX_DEPTH {
            return Err(ParseError::new(ParseErrorKind::TooDeep, open));
        }
        self.bump(); // '('
        self.skip_ws();

        let first_pos = self.pos;
        let first = self.take_while(is_word_char);
        self.skip_ws();
        let (coindex_var, category, category_pos) = if self.peek() == Some('/') {
            if first.is_empty() {
                return Err(ParseError::new(
                    ParseErrorKind::SlashWithoutVariable,
                    self.pos,
                ));
            }
            if !is_valid_variable(first) {
                return Err(ParseError::new(
                    ParseErrorKind::InvalidVariable(first.to_string()),
                    first_pos,
                ));
            }
            self.bump();
            self.skip_ws();
            let cat_pos = self.pos;
            (Some(first.to_string()), self.take_while(is_word_char), cat_pos)
        } else {
            (None, first, first_pos)
        };
        if category.is_empty() {
            return Err(match self.peek() {
                None => ParseError::new(ParseErrorKind::UnbalancedParenthesis, open),
                _ => ParseError::new(ParseErrorKind::MissingCategory, category_pos),
            });
        }

        let mut node = RawNode {
            category: category.to_string(),
            coindex_var,
            features: Vec::new(),
            children: Vec::new(),
            span: Span::default(),
        };

        loop {
            self.skip_ws();
            let Some(c) = self.peek() else {
                return Err(ParseError::new(ParseErrorKind::UnbalancedParenthesis, open));
            };
            match c {
                ')' => {
                    self.bump();
                    break;
                }
                ':' => {
                    self.bump();
                    let name_pos = self.pos;
                    let name = self.take_while(is_name_char);
                    if name.is_empty() {
                        return Err(ParseError::new(ParseErrorKind::MissingName, name_pos));
                    }
                    self.skip_ws();
                    match self.peek() {
                        Some('"') => {
                            let Some(key) = FeatureKey::from_name(name) else {
                                return Err(ParseError::new(
                                    ParseErrorKind::UnknownFeatureKey(name.to_string()),
                                    name_pos,
                                ));
                            };
                            if !node.children.is_empty() {
                                return Err(ParseError::new(
                                    ParseErrorKind::FeatureAfterChild(name.to_string()),
                                    name_pos,
                                ));
                            }
                            let value = self.string()?;
                            node.features.push(Feature { key, value });
                        }
                        Some('(') => {
                            let child = self.node(depth + 1)?;
                            node.children.push(RawChild {
                                function: name.to_string(),
                                node: child,
                            });
                        }
                        None => {
                            return Err(ParseError::new(
                                ParseErrorKind::UnbalancedParenthesis,
                                open,
                            ))
                        }
                        Some(other) => {
                            return Err(ParseError::new(
                                ParseErrorKind::UnexpectedChar(other),
                                self.pos,
                            ))
                        }
                    }
                }
                '(' => {
                    return Err(ParseError::new(
                        ParseErrorKind::ChildWithoutFunction,
                        self.pos,
                    ))
                }
                other => {
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedChar(other),
                        self.pos,
                    ))
                }
            }
        }
        node.span = Span {
            start: open,
            end: self.pos,
        };
        Ok(node)
    }

    fn string(&mut self) -> Result<String> {
        let open = self.pos;
        self.bump(); // '"'
        let mut value = String::new();
        loop {
            let esc_pos = self.pos;
            match self.bump() {
                None => return Err(ParseError::new(ParseErrorKind::UnterminatedString, open)),
                Some('"') => return Ok(value),
                Some('\\') => {
                    match self.bump() {
                        Some(c @ ('"' | '\\')) => value.push(c),
                        Some(c) => {
                            return Err(ParseError::new(ParseErrorKind::InvalidEscape(c), esc_pos))
                        }
                        None => {
                            return Err(ParseError::new(ParseErrorKind::UnterminatedString, open))
                        }
                    }
                }
                Some(c) => value.push(c),
            }
        }
    }
}

/// Output layout for [`serialize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    /// Four-space indentation, one constituent per line.
    #[default]
    Canonical,
    /// The original source text when the tree is unchanged since parsing,
    /// canonical layout otherwise.
    Preserved,
}

pub fn escape_string(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    for c in value.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

/// Serialize one entry. The result ends with a newline.
pub fn serialize(tree: &SourceTree, style: Style) -> String {
    if style == Style::Preserved {
        if let Some(original) = tree.original_text() {
            let unchanged = parse_corpus(original)
                .ok()
                .filter(|t| t.len() == 1)
                .is_some_and(|t| t[0].structurally_eq(tree));
            if unchanged {
                return format!("{original}\n");
            }
        }
    }
    let mut out = String::new();
    for (key, value) in &tree.headers {
        if value.is_empty() {
            out.push_str(&format!("# {key} =\n"));
        } else {
            out.push_str(&format!("# {key} = {value}\n"));
        }
    }
    write_node(&mut out, &tree.root, 0);
    out.push('\n');
    out
}

/// Serialize several entries separated by blank lines.
pub fn serialize_corpus(trees: &[SourceTree], style: Style) -> String {
    trees
        .iter()
        .map(|t| serialize(t, style))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Canonical text of a single constituent.
pub fn serialize_node(node: &RawNode) -> String {
    let mut out = String::new();
    write_node(&mut out, node, 0);
    out
}

fn write_node(out: &mut String, node: &RawNode, depth: usize) {
    out.push('(');
    if let Some(var) = &node.coindex_var {
        out.push_str(var);
        out.push_str(" / ");
    }
    out.push_str(&node.category);
    for feature in &node.features {
        out.push_str(&format!(
            " :{} \"{}\"",
            feature.key,
            escape_string(&feature.value)
        ));
    }
    for child in &node.children {
        out.push('\n');
        for _ in 0..=depth {
            out.push_str("    ");
        }
        out.push(':');
        out.push_str(&child.function);
        out.push(' ');
        write_node(out, &child.node, depth + 1);
    }
    out.push(')');
}
