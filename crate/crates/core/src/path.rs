//! Property-path expressions: AST, parser, renderer and inverse normalization.
//!
//! Syntax (loosest to tightest):
//!
//! ```text
//! alt     := seq (('|' | '+') seq)*
//! seq     := postfix ('/' postfix)*
//! postfix := inverse ('*' | '?')*
//! inverse := '^' inverse | primary
//! primary := '<' iri '>' | prefix:local | name | '(' alt ')'
//! ```
//!
//! A bare `name` is shorthand for `:name` and needs the empty prefix declared.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::term::{has_scheme, Iri};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum PathExpr {
    Atom(Iri),
    Inverse(Box<PathExpr>),
    Concat(Box<PathExpr>, Box<PathExpr>),
    Alt(Box<PathExpr>, Box<PathExpr>),
    Star(Box<PathExpr>),
    Opt(Box<PathExpr>),
}

impl PathExpr {
    pub fn atom(iri: impl AsRef<str>) -> Self {
        PathExpr::Atom(Iri::new(iri))
    }

    pub fn inverse(inner: PathExpr) -> Self {
        PathExpr::Inverse(Box::new(inner))
    }

    pub fn concat(left: PathExpr, right: PathExpr) -> Self {
        PathExpr::Concat(Box::new(left), Box::new(right))
    }

    pub fn alt(left: PathExpr, right: PathExpr) -> Self {
        PathExpr::Alt(Box::new(left), Box::new(right))
    }

    pub fn star(inner: PathExpr) -> Self {
        PathExpr::Star(Box::new(inner))
    }

    pub fn opt(inner: PathExpr) -> Self {
        PathExpr::Opt(Box::new(inner))
    }

    pub fn depth(&self) -> usize {
        match self {
            PathExpr::Atom(_) => 1,
            PathExpr::Inverse(e) | PathExpr::Star(e) | PathExpr::Opt(e) => 1 + e.depth(),
            PathExpr::Concat(l, r) | PathExpr::Alt(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// True when every `Inverse` sits directly above an `Atom`.
    pub fn is_inverse_normal(&self) -> bool {
        match self {
            PathExpr::Atom(_) => true,
            PathExpr::Inverse(inner) => matches!(**inner, PathExpr::Atom(_)),
            PathExpr::Star(e) | PathExpr::Opt(e) => e.is_inverse_normal(),
            PathExpr::Concat(l, r) | PathExpr::Alt(l, r) => l.is_inverse_normal() && r.is_inverse_normal(),
        }
    }

    /// Pushes inverses down to the atoms.
    pub fn normalize_inverse(&self) -> PathExpr {
        self.push_inverse(false)
    }

    fn push_inverse(&self, inverted: bool) -> PathExpr {
        match self {
            PathExpr::Atom(iri) => {
                let atom = PathExpr::Atom(iri.clone());
                if inverted {
                    PathExpr::inverse(atom)
                } else {
                    atom
                }
            }
            PathExpr::Inverse(inner) => inner.push_inverse(!inverted),
            PathExpr::Concat(l, r) if inverted => PathExpr::concat(r.push_inverse(true), l.push_inverse(true)),
            PathExpr::Concat(l, r) => PathExpr::concat(l.push_inverse(false), r.push_inverse(false)),
            PathExpr::Alt(l, r) => PathExpr::alt(l.push_inverse(inverted), r.push_inverse(inverted)),
            PathExpr::Star(e) => PathExpr::star(e.push_inverse(inverted)),
            PathExpr::Opt(e) => PathExpr::opt(e.push_inverse(inverted)),
        }
    }

    /// Renders with full IRIs.
    pub fn render_plain(&self) -> String {
        render(self, &PrefixTable::new())
    }
}

impl fmt::Debug for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathExpr::Atom(iri) => write!(f, "Atom({})", iri.as_str()),
            PathExpr::Inverse(e) => write!(f, "Inverse({e:?})"),
            PathExpr::Concat(l, r) => write!(f, "Concat({l:?}, {r:?})"),
            PathExpr::Alt(l, r) => write!(f, "Alt({l:?}, {r:?})"),
            PathExpr::Star(e) => write!(f, "Star({e:?})"),
            PathExpr::Opt(e) => write!(f, "Opt({e:?})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    #[error("prefix '{0}:' declared twice")]
    Duplicate(String),
    #[error("prefix '{0}:' has an empty namespace")]
    EmptyNamespace(String),
    #[error("invalid prefix label '{0}'")]
    InvalidLabel(String),
    #[error("expected 'label=namespace', got '{0}'")]
    Malformed(String),
}

/// Prefix label to namespace IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixTable {
    map: BTreeMap<String, String>,
}

impl PrefixTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The prefixes used throughout DBLP-style examples.
    pub fn common() -> Self {
        let mut table = PrefixTable::new();
        for (label, ns) in [
            ("dc", "http://purl.org/dc/elements/1.1/"),
            ("dcterms", "http://purl.org/dc/terms/"),
            ("foaf", "http://xmlns.com/foaf/0.1/"),
            ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
            ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
            ("owl", "http://www.w3.org/2002/07/owl#"),
            ("xsd", "http://www.w3.org/2001/XMLSchema#"),
        ] {
            table.map.insert(label.into(), ns.into());
        }
        table
    }

    pub fn insert(&mut self, label: impl Into<String>, namespace: impl Into<String>) -> Result<(), PrefixError> {
        let label = label.into();
        let namespace = namespace.into();
        if !label
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(PrefixError::InvalidLabel(label));
        }
        if namespace.is_empty() {
            return Err(PrefixError::EmptyNamespace(label));
        }
        if self.map.contains_key(&label) {
            return Err(PrefixError::Duplicate(label));
        }
        self.map.insert(label, namespace);
        Ok(())
    }

    /// Inserts or replaces a declaration.
    pub fn set(&mut self, label: impl Into<String>, namespace: impl Into<String>) -> Result<(), PrefixError> {
        let label = label.into();
        self.map.remove(&label);
        self.insert(label, namespace)
    }

    /// Parses one `label=namespace` declaration line.
    pub fn parse_declaration(line: &str) -> Result<(String, String), PrefixError> {
        let (label, ns) = line
            .split_once('=')
            .ok_or_else(|| PrefixError::Malformed(line.to_string()))?;
        let label = label.trim().trim_end_matches(':');
        Ok((label.to_string(), ns.trim().to_string()))
    }

    /// Reads `label=namespace` lines, ignoring blanks and `#` comments.
    pub fn parse_lines(text: &str) -> Result<Self, PrefixError> {
        let mut table = PrefixTable::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let (label, ns) = Self::parse_declaration(line)?;
            table.insert(label, ns)?;
        }
        Ok(table)
    }

    pub fn namespace(&self, label: &str) -> Option<&str> {
        self.map.get(label).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// `prefix:local` for the longest matching namespace whose local part
    /// needs no escaping.
    pub fn compact(&self, iri: &str) -> Option<String> {
        self.map
            .iter()
            .filter(|(_, ns)| iri.starts_with(ns.as_str()))
            .filter(|(_, ns)| is_plain_local(&iri[ns.len()..]))
            .max_by_key(|(label, ns)| (ns.len(), std::cmp::Reverse((*label).clone())))
            .map(|(label, ns)| format!("{label}:{}", &iri[ns.len()..]))
    }

    /// Expands a prefixed name such as `dc:creator` or `<http://...>`.
    pub fn expand(&self, name: &str) -> Option<Iri> {
        if let Some(inner) = name.strip_prefix('<').and_then(|n| n.strip_suffix('>')) {
            return has_scheme(inner).then(|| Iri::new(inner));
        }
        let (label, local) = name.split_once(':')?;
        self.namespace(label).map(|ns| Iri::new(format!("{ns}{local}")))
    }

    /// Renders an IRI compactly if possible, else as `<iri>`.
    pub fn show(&self, iri: &Iri) -> String {
        self.compact(iri.as_str()).unwrap_or_else(|| iri.to_string())
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%')
}

fn is_plain_local(local: &str) -> bool {
    local.chars().all(is_name_char) && !local.ends_with('.')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unbalanced parenthesis")]
    UnbalancedParen,
    #[error("operator without operand")]
    DanglingOperator,
    #[error("unknown prefix '{0}:'")]
    UnknownPrefix(String),
    #[error("invalid IRI")]
    InvalidIri,
    #[error("literals cannot appear in a path")]
    Literal,
    #[error("unexpected character {0:?}")]
    Unexpected(char),
}

/// Syntax error at a 0-based character position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {kind}")]
pub struct PathError {
    pub position: usize,
    pub kind: PathErrorKind,
}

pub fn parse(text: &str, prefixes: &PrefixTable) -> Result<PathExpr, PathError> {
    let mut parser = PathParser {
        chars: text.chars().collect(),
        pos: 0,
        prefixes,
    };
    parser.skip_ws();
    if parser.at_end() {
        return Err(parser.error(PathErrorKind::Empty));
    }
    let expr = parser.alt()?;
    parser.skip_ws();
    match parser.peek() {
        None => Ok(expr),
        Some(')') => Err(parser.error(PathErrorKind::UnbalancedParen)),
        Some(c) => Err(parser.error(PathErrorKind::Unexpected(c))),
    }
}

struct PathParser<'a> {
    chars: Vec<char>,
    pos: usize,
    prefixes: &'a PrefixTable,
}

impl PathParser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, kind: PathErrorKind) -> PathError {
        PathError {
            position: self.pos,
            kind,
        }
    }

    fn error_at(&self, position: usize, kind: PathErrorKind) -> PathError {
        PathError { position, kind }
    }

    fn alt(&mut self) -> Result<PathExpr, PathError> {
        let mut left = self.seq()?;
        loop {
            self.skip_ws();
            if !matches!(self.peek(), Some('|' | '+')) {
                return Ok(left);
            }
            self.pos += 1;
            let right = self.seq()?;
            left = PathExpr::alt(left, right);
        }
    }

    fn seq(&mut self) -> Result<PathExpr, PathError> {
        let mut left = self.postfix()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('/') {
                return Ok(left);
            }
            self.pos += 1;
            let right = self.postfix()?;
            left = PathExpr::concat(left, right);
        }
    }

    fn postfix(&mut self) -> Result<PathExpr, PathError> {
        let mut expr = self.inverse()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => expr = PathExpr::star(expr),
                Some('?') => expr = PathExpr::opt(expr),
                _ => return Ok(expr),
            }
            self.pos += 1;
        }
    }

    fn inverse(&mut self) -> Result<PathExpr, PathError> {
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            return Ok(PathExpr::inverse(self.inverse()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<PathExpr, PathError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None | Some('/' | '|' | '+' | '*' | '?' | ')') => Err(self.error(PathErrorKind::DanglingOperator)),
            Some('(') => {
                self.pos += 1;
                let inner = self.alt()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error_at(start, PathErrorKind::UnbalancedParen));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('<') => {
                self.pos += 1;
                let mut iri = String::new();
                loop {
                    match self.peek() {
                        None => return Err(self.error_at(start, PathErrorKind::InvalidIri)),
                        Some('>') => break,
                        Some(c) if c.is_whitespace() || c == '<' => {
                            return Err(self.error(PathErrorKind::InvalidIri));
                        }
                        Some(c) => iri.push(c),
                    }
                    self.pos += 1;
                }
                self.pos += 1;
                if !has_scheme(&iri) {
                    return Err(self.error_at(start, PathErrorKind::InvalidIri));
                }
                Ok(PathExpr::atom(iri))
            }
            Some('"' | '\'') => Err(self.error(PathErrorKind::Literal)),
            Some(c) if is_name_char(c) && c != '.' => {
                let mut name = String::new();
                while let Some(c) = self.peek().filter(|c| is_name_char(*c)) {
                    name.push(c);
                    self.pos += 1;
                }
                let (label, local) = name.split_once(':').unwrap_or(("", name.as_str()));
                let ns = self
                    .prefixes
                    .namespace(label)
                    .ok_or_else(|| self.error_at(start, PathErrorKind::UnknownPrefix(label.to_string())))?;
                Ok(PathExpr::atom(format!("{ns}{local}")))
            }
            Some(c) => Err(self.error(PathErrorKind::Unexpected(c))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Alt,
    Seq,
    Postfix,
    Prefix,
}

fn prec(expr: &PathExpr) -> Prec {
    match expr {
        PathExpr::Alt(..) => Prec::Alt,
        PathExpr::Concat(..) => Prec::Seq,
        PathExpr::Star(_) | PathExpr::Opt(_) => Prec::Postfix,
        PathExpr::Inverse(_) | PathExpr::Atom(_) => Prec::Prefix,
    }
}

/// Renders an expression so that `parse(render(e)) == e`, using `|` for
/// alternation and the fewest parentheses the precedence rules allow.
pub fn render(expr: &PathExpr, prefixes: &PrefixTable) -> String {
    let mut out = String::new();
    write_expr(expr, prefixes, Prec::Alt, &mut out);
    out
}

fn write_expr(expr: &PathExpr, prefixes: &PrefixTable, min: Prec, out: &mut String) {
    if prec(expr) < min {
        out.push('(');
        write_expr(expr, prefixes, Prec::Alt, out);
        out.push(')');
        return;
    }
    match expr {
        PathExpr::Atom(iri) => out.push_str(&prefixes.show(iri)),
        PathExpr::Inverse(inner) => {
            out.push('^');
            write_expr(inner, prefixes, Prec::Prefix, out);
        }
        PathExpr::Concat(l, r) => {
            write_expr(l, prefixes, Prec::Seq, out);
            out.push('/');
            write_expr(r, prefixes, Prec::Postfix, out);
        }
        PathExpr::Alt(l, r) => {
            write_expr(l, prefixes, Prec::Alt, out);
            out.push('|');
            write_expr(r, prefixes, Prec::Seq, out);
        }
        PathExpr::Star(inner) => {
            write_expr(inner, prefixes, Prec::Postfix, out);
            out.push('*');
        }
        PathExpr::Opt(inner) => {
            write_expr(inner, prefixes, Prec::Postfix, out);
            out.push('?');
        }
    }
}
