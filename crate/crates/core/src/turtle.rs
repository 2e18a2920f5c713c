//! Reader for the Turtle subset accepted on HTTP responses.
//!
//! Supported: `@prefix`/`PREFIX`, `@base`/`BASE`, IRIs (relative ones resolved
//! against the base), prefixed names, the `a` keyword, `;` and `,` lists,
//! string literals (short and long) with language tags or datatypes, and bare
//! integer/decimal/boolean literals. Blank nodes, `[...]` and collections are
//! outside the subset.

use std::collections::HashMap;

use url::Url;

use crate::syntax::{literal_with, BlankNodes, Cursor, SyntaxError, RDF_TYPE, XSD};
use crate::term::{has_scheme, Iri, Literal, Term, Triple};
use crate::Document;

pub fn parse(text: &str, base: Option<&str>) -> Result<Document, SyntaxError> {
    parse_with(text, base, BlankNodes::Reject)
}

pub fn parse_with(text: &str, base: Option<&str>, blank_nodes: BlankNodes) -> Result<Document, SyntaxError> {
    let mut parser = Parser {
        cur: Cursor::new(text),
        prefixes: HashMap::new(),
        base: base.and_then(|b| Url::parse(b).ok()),
        blank_nodes,
        doc: Document::new(),
    };
    parser.document()?;
    Ok(parser.doc)
}

struct Parser<'a> {
    cur: Cursor<'a>,
    prefixes: HashMap<String, String>,
    base: Option<Url>,
    blank_nodes: BlankNodes,
    doc: Document,
}

/// `None` marks a skipped blank node.
type Node = Option<Term>;

impl Parser<'_> {
    fn document(&mut self) -> Result<(), SyntaxError> {
        loop {
            self.cur.skip_ws(true);
            if self.cur.at_end() {
                return Ok(());
            }
            if self.cur.eat_str("@prefix") {
                self.prefix_decl()?;
                self.expect_dot()?;
            } else if self.keyword("PREFIX") {
                self.prefix_decl()?;
            } else if self.cur.eat_str("@base") {
                self.base_decl()?;
                self.expect_dot()?;
            } else if self.keyword("BASE") {
                self.base_decl()?;
            } else {
                self.triples()?;
                self.expect_dot()?;
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        let rest = self.cur.rest();
        if rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && rest[kw.len()..].starts_with(|c: char| c.is_whitespace())
        {
            self.cur.eat_str(&rest[..kw.len()]);
            true
        } else {
            false
        }
    }

    fn expect_dot(&mut self) -> Result<(), SyntaxError> {
        self.cur.skip_ws(true);
        if self.cur.eat('.') {
            Ok(())
        } else {
            Err(self.cur.error("expected '.'"))
        }
    }

    fn prefix_decl(&mut self) -> Result<(), SyntaxError> {
        self.cur.skip_ws(true);
        let label = self.pn_prefix();
        if !self.cur.eat(':') {
            return Err(self.cur.error("expected ':' in prefix declaration"));
        }
        self.cur.skip_ws(true);
        let ns = self.iriref()?;
        self.prefixes.insert(label, ns.as_str().to_string());
        Ok(())
    }

    fn base_decl(&mut self) -> Result<(), SyntaxError> {
        self.cur.skip_ws(true);
        let iri = self.iriref()?;
        self.base = Url::parse(iri.as_str()).ok();
        Ok(())
    }

    fn pn_prefix(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.cur.peek() {
            if c.is_alphanumeric()
                || matches!(c, '_' | '-')
                || (c == '.' && !out.is_empty() && self.cur.peek_nth(1) != Some(':'))
            {
                out.push(c);
                self.cur.bump();
            } else {
                break;
            }
        }
        out
    }

    fn iriref(&mut self) -> Result<Iri, SyntaxError> {
        let raw = self.cur.iriref()?;
        if has_scheme(&raw) {
            return Ok(Iri::new(raw));
        }
        let resolved = self
            .base
            .as_ref()
            .and_then(|b| b.join(&raw).ok())
            .ok_or_else(|| self.cur.error(format!("cannot resolve relative IRI <{raw}>")))?;
        Ok(Iri::new(resolved.as_str()))
    }

    fn prefixed_name(&mut self) -> Result<Iri, SyntaxError> {
        let prefix = self.pn_prefix();
        if !self.cur.eat(':') {
            return Err(self.cur.error("expected prefixed name"));
        }
        let ns = self
            .prefixes
            .get(&prefix)
            .cloned()
            .ok_or_else(|| self.cur.error(format!("unknown prefix '{prefix}:'")))?;
        let mut local = String::new();
        while let Some(c) = self.cur.peek() {
            match c {
                c if c.is_alphanumeric() || matches!(c, '_' | '-' | ':') => {
                    local.push(c);
                    self.cur.bump();
                }
                '.' if self
                    .cur
                    .peek_nth(1)
                    .is_some_and(|n| n.is_alphanumeric() || matches!(n, '_' | '-' | ':' | '%' | '\\')) =>
                {
                    local.push(c);
                    self.cur.bump();
                }
                '%' => {
                    local.push(c);
                    self.cur.bump();
                    for _ in 0..2 {
                        match self.cur.bump() {
                            Some(h) if h.is_ascii_hexdigit() => local.push(h),
                            _ => return Err(self.cur.error("invalid percent escape")),
                        }
                    }
                }
                '\\' => {
                    self.cur.bump();
                    match self.cur.bump() {
                        Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                        _ => return Err(self.cur.error("invalid local name escape")),
                    }
                }
                _ => break,
            }
        }
        Ok(Iri::new(format!("{ns}{local}")))
    }

    fn iri(&mut self) -> Result<Iri, SyntaxError> {
        if self.cur.peek() == Some('<') {
            self.iriref()
        } else {
            self.prefixed_name()
        }
    }

    fn triples(&mut self) -> Result<(), SyntaxError> {
        let subject = match self.cur.peek() {
            Some('_') if self.cur.peek_nth(1) == Some(':') => self.blank()?,
            Some('[' | '(') => return Err(self.cur.error("anonymous nodes and collections are not supported")),
            _ => Some(Term::Iri(self.iri()?)),
        };
        loop {
            self.cur.skip_ws(true);
            let predicate = self.verb()?;
            loop {
                self.cur.skip_ws(true);
                let object = self.object()?;
                if let (Some(s), Some(o)) = (&subject, object) {
                    self.doc.insert(Triple {
                        subject: s.clone(),
                        predicate: predicate.clone(),
                        object: o,
                    });
                }
                self.cur.skip_ws(true);
                if !self.cur.eat(',') {
                    break;
                }
            }
            self.cur.skip_ws(true);
            if !self.cur.eat(';') {
                return Ok(());
            }
            // `;` may be repeated or trail the last predicate-object pair
            loop {
                self.cur.skip_ws(true);
                if !self.cur.eat(';') {
                    break;
                }
            }
            if matches!(self.cur.peek(), Some('.') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Iri, SyntaxError> {
        if self.cur.peek() == Some('a') && self.cur.peek_nth(1).is_some_and(|c| c.is_whitespace() || c == '<') {
            self.cur.bump();
            return Ok(Iri::new(RDF_TYPE));
        }
        self.iri()
    }

    fn blank(&mut self) -> Result<Node, SyntaxError> {
        match self.blank_nodes {
            BlankNodes::Reject => Err(self.cur.error("blank nodes are not supported")),
            BlankNodes::Skip => self.cur.blank_label().map(|_| None),
        }
    }

    fn object(&mut self) -> Result<Node, SyntaxError> {
        match self.cur.peek() {
            Some('"' | '\'') => {
                let lexical = self.cur.quoted(true)?;
                let (mut language, mut datatype) = (None, None);
                if self.cur.peek() == Some('@') {
                    language = Some(self.cur.lang_tag()?);
                } else if self.cur.eat_str("^^") {
                    datatype = Some(self.iri()?);
                }
                Ok(Some(Term::Literal(literal_with(lexical, language, datatype))))
            }
            Some('_') if self.cur.peek_nth(1) == Some(':') => self.blank(),
            Some('[' | '(') => Err(self.cur.error("anonymous nodes and collections are not supported")),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-') => self.number(),
            _ if self.literal_keyword("true") => Ok(Some(boolean("true"))),
            _ if self.literal_keyword("false") => Ok(Some(boolean("false"))),
            _ => Ok(Some(Term::Iri(self.iri()?))),
        }
    }

    fn literal_keyword(&mut self, kw: &str) -> bool {
        let rest = self.cur.rest();
        let after = rest[kw.len().min(rest.len())..].chars().next();
        if rest.starts_with(kw) && !after.is_some_and(|c| c.is_alphanumeric() || matches!(c, ':' | '_' | '-')) {
            self.cur.eat_str(kw)
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<Node, SyntaxError> {
        let mut lexical = String::new();
        if let Some(sign @ ('+' | '-')) = self.cur.peek() {
            lexical.push(sign);
            self.cur.bump();
        }
        let mut decimal = false;
        while let Some(c) = self.cur.peek() {
            if c.is_ascii_digit() {
                lexical.push(c);
                self.cur.bump();
            } else if c == '.' && !decimal && self.cur.peek_nth(1).is_some_and(|n| n.is_ascii_digit()) {
                decimal = true;
                lexical.push(c);
                self.cur.bump();
            } else {
                break;
            }
        }
        if !lexical.chars().any(|c| c.is_ascii_digit()) {
            return Err(self.cur.error("invalid number"));
        }
        let dt = if decimal { "decimal" } else { "integer" };
        Ok(Some(Term::Literal(Literal::typed(
            lexical,
            Iri::new(format!("{XSD}{dt}")),
        ))))
    }
}

fn boolean(v: &str) -> Term {
    Term::Literal(Literal::typed(v, Iri::new(format!("{XSD}boolean"))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Term {
        Term::iri(s)
    }

    #[test]
    fn prefixes_and_abbreviations() {
        let text = r#"
@prefix dc: <http://purl.org/dc/elements/1.1/> .
PREFIX ex: <http://ex.org/>
ex:p1 dc:creator ex:alice , ex:bob ;
      dc:title "A \"paper\""@en ;
      a ex:Paper .
"#;
        let doc = parse(text, None).unwrap();
        assert_eq!(doc.len(), 4);
        assert!(doc.contains(&Triple::new(
            iri("http://ex.org/p1"),
            "http://purl.org/dc/elements/1.1/creator",
            iri("http://ex.org/bob")
        )));
        assert!(doc.contains(&Triple::new(
            iri("http://ex.org/p1"),
            RDF_TYPE,
            iri("http://ex.org/Paper")
        )));
    }

    #[test]
    fn relative_iris_resolve_against_base() {
        let doc = parse("<a> <http://p> <../b> .", Some("http://ex.org/x/y")).unwrap();
        assert!(doc.contains(&Triple::new(
            iri("http://ex.org/x/a"),
            "http://p",
            iri("http://ex.org/b")
        )));
        assert!(parse("<a> <http://p> <b> .", None).is_err());
    }

    #[test]
    fn numbers_booleans_and_long_strings() {
        let text = "@prefix : <http://e/> .\n:s :p 42, -1.5, true ;\n :q \"\"\"multi\nline\"\"\" .";
        let doc = parse(text, None).unwrap();
        assert_eq!(doc.len(), 4);
        assert!(doc.contains(&Triple::new(
            iri("http://e/s"),
            "http://e/p",
            Literal::typed("42", Iri::new(format!("{XSD}integer")))
        )));
        assert!(doc.contains(&Triple::new(
            iri("http://e/s"),
            "http://e/q",
            Literal::simple("multi\nline")
        )));
    }

    #[test]
    fn local_names_with_dots() {
        let doc = parse("@prefix e: <http://e/> . e:a.b e:p e:c .", None).unwrap();
        assert!(doc.contains(&Triple::new(iri("http://e/a.b"), "http://e/p", iri("http://e/c"))));
    }

    #[test]
    fn unknown_prefix_is_an_error() {
        let err = parse("x:a <http://p> <http://o> .", None).unwrap_err();
        assert!(err.message.contains("unknown prefix"));
    }

    #[test]
    fn blank_nodes_skipped_on_request() {
        let text = "@prefix e: <http://e/> . _:b e:p e:c . e:a e:p _:b , e:d .";
        assert!(parse(text, None).is_err());
        let doc = parse_with(text, None, BlankNodes::Skip).unwrap();
        assert_eq!(doc.len(), 1);
    }
}
