//! Shared lexing helpers for the N-Triples and Turtle readers.

use thiserror::Error;

use crate::term::{has_scheme, Iri, Literal};

/// A syntax error in an RDF document, positioned by 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// What to do with triples mentioning blank nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlankNodes {
    /// Fail with a syntax error.
    #[default]
    Reject,
    /// Drop the triple and keep going.
    Skip,
}

pub(crate) const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub(crate) const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor {
            src,
            pos: 0,
            line: 1,
            line_start: 0,
        }
    }

    pub fn with_line(src: &'a str, line: usize) -> Self {
        Cursor {
            line,
            ..Cursor::new(src)
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos;
        }
        Some(c)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            column: self.src[self.line_start..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    /// Skips spaces, tabs, newlines and `#` comments.
    pub fn skip_ws(&mut self, newlines: bool) {
        while let Some(c) = self.peek() {
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '\n' if newlines => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    /// Reads `<...>` and returns the raw (unescaped) content.
    pub fn iriref(&mut self) -> Result<String, SyntaxError> {
        if !self.eat('<') {
            return Err(self.error("expected '<'"));
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => return Ok(out),
                Some('\\') => out.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.error(format!("invalid character {c:?} in IRI")));
                }
                Some(c) => out.push(c),
            }
        }
    }

    pub fn absolute_iriref(&mut self) -> Result<Iri, SyntaxError> {
        let raw = self.iriref()?;
        if !has_scheme(&raw) {
            return Err(self.error(format!("relative IRI <{raw}>")));
        }
        Ok(Iri::new(raw))
    }

    fn unicode_escape(&mut self) -> Result<char, SyntaxError> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape")),
        };
        let mut code = 0u32;
        for _ in 0..len {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("invalid hex digit in escape"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.error("escape is not a Unicode scalar value"))
    }

    /// Reads a quoted string, either `"..."`/`'...'` or a long `"""..."""` form
    /// when `long_allowed`.
    pub fn quoted(&mut self, long_allowed: bool) -> Result<String, SyntaxError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected string")),
        };
        let triple: String = std::iter::repeat_n(quote, 3).collect();
        let long = long_allowed && self.rest().starts_with(&triple);
        if long {
            self.eat_str(&triple);
        } else {
            self.bump();
        }
        let mut out = String::new();
        loop {
            if long && self.eat_str(&triple) {
                return Ok(out);
            }
            match self.bump() {
                None => return Err(self.error("unterminated string")),
                Some(c) if c == quote && !long => return Ok(out),
                Some('\n' | '\r') if !long => return Err(self.error("newline in string")),
                Some('\\') => {
                    let c = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u' | 'U') => {
                            out.push(self.unicode_escape()?);
                            continue;
                        }
                        _ => return Err(self.error("invalid escape")),
                    };
                    self.bump();
                    out.push(c);
                }
                Some(c) => out.push(c),
            }
        }
    }

    /// Reads `@lang` after a string; the `@` must be the next character.
    pub fn lang_tag(&mut self) -> Result<String, SyntaxError> {
        self.bump();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '-' {
                self.bump();
            } else {
                break;
            }
        }
        let tag = &self.src[start..self.pos];
        if tag.is_empty() || !tag.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            return Err(self.error("invalid language tag"));
        }
        Ok(tag.to_string())
    }

    /// Reads a blank node label `_:x` and returns it.
    pub fn blank_label(&mut self) -> Result<String, SyntaxError> {
        if !self.eat_str("_:") {
            return Err(self.error("expected blank node"));
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                self.bump();
            } else {
                break;
            }
        }
        // a trailing '.' ends the statement, not the label
        while self.src[start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        if self.pos == start {
            return Err(self.error("empty blank node label"));
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

pub(crate) fn literal_with(lexical: String, language: Option<String>, datatype: Option<Iri>) -> Literal {
    match (language, datatype) {
        (Some(lang), _) => Literal::lang(lexical, lang),
        (None, Some(dt)) => Literal::typed(lexical, dt),
        (None, None) => Literal::simple(lexical),
    }
}
