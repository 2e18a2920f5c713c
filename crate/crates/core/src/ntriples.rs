//! N-Triples reader and writer.

use std::fmt::Write as _;

use crate::syntax::{literal_with, BlankNodes, Cursor, SyntaxError};
use crate::term::{Document, Term, Triple};

/// Parses an N-Triples document, rejecting blank nodes.
pub fn parse(text: &str) -> Result<Document, SyntaxError> {
    parse_with(text, BlankNodes::Reject)
}

pub fn parse_with(text: &str, blank_nodes: BlankNodes) -> Result<Document, SyntaxError> {
    let mut doc = Document::new();
    for (idx, line) in text.lines().enumerate() {
        let mut cur = Cursor::with_line(line, idx + 1);
        cur.skip_ws(false);
        if cur.at_end() {
            continue;
        }
        if let Some(triple) = statement(&mut cur, blank_nodes)? {
            doc.insert(triple);
        }
        cur.skip_ws(false);
        if !cur.at_end() {
            return Err(cur.error("trailing content after '.'"));
        }
    }
    Ok(doc)
}

fn statement(cur: &mut Cursor<'_>, blank_nodes: BlankNodes) -> Result<Option<Triple>, SyntaxError> {
    let mut has_blank = false;
    let subject = match cur.peek() {
        Some('<') => Some(Term::Iri(cur.absolute_iriref()?)),
        Some('_') => {
            blank(cur, blank_nodes)?;
            has_blank = true;
            None
        }
        _ => return Err(cur.error("expected subject")),
    };
    cur.skip_ws(false);
    let predicate = cur.absolute_iriref()?;
    cur.skip_ws(false);
    let object = match cur.peek() {
        Some('<') => Some(Term::Iri(cur.absolute_iriref()?)),
        Some('_') => {
            blank(cur, blank_nodes)?;
            has_blank = true;
            None
        }
        Some('"') => {
            let lexical = cur.quoted(false)?;
            let (mut language, mut datatype) = (None, None);
            if cur.peek() == Some('@') {
                language = Some(cur.lang_tag()?);
            } else if cur.eat_str("^^") {
                datatype = Some(cur.absolute_iriref()?);
            }
            Some(Term::Literal(literal_with(lexical, language, datatype)))
        }
        _ => return Err(cur.error("expected object")),
    };
    cur.skip_ws(false);
    if !cur.eat('.') {
        return Err(cur.error("expected '.'"));
    }
    if has_blank {
        return Ok(None);
    }
    Ok(Some(Triple {
        subject: subject.expect("subject parsed"),
        predicate,
        object: object.expect("object parsed"),
    }))
}

fn blank(cur: &mut Cursor<'_>, policy: BlankNodes) -> Result<(), SyntaxError> {
    match policy {
        BlankNodes::Reject => Err(cur.error("blank nodes are not supported")),
        BlankNodes::Skip => cur.blank_label().map(drop),
    }
}

/// Serializes a document, one triple per line in sorted order.
pub fn serialize(doc: &Document) -> String {
    let mut out = String::new();
    for triple in doc {
        let _ = writeln!(out, "{triple}");
    }
    out
}
