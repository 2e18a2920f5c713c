//! SPARQL endpoints used to complete dereferenced documents.
//!
//! For every (predicate, direction) pair an automaton state can follow, the
//! endpoint is asked for the IRIs linked to the node in that direction only.

use std::fmt;
use std::time::Duration;

use serde_json::Value;

use super::SourceError;
use crate::term::{Document, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// One endpoint question: the terms linked to a node through `predicate` in
/// `direction`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    pub predicate: Iri,
    pub direction: Direction,
}

impl Pattern {
    pub fn forward(predicate: impl Into<Iri>) -> Self {
        Pattern {
            predicate: predicate.into(),
            direction: Direction::Forward,
        }
    }

    pub fn backward(predicate: impl Into<Iri>) -> Self {
        Pattern {
            predicate: predicate.into(),
            direction: Direction::Backward,
        }
    }

    /// The triple that an answer `x` stands for.
    pub fn triple(&self, node: &Iri, x: Term) -> Triple {
        match self.direction {
            Direction::Forward => Triple::new(node.clone(), self.predicate.clone(), x),
            Direction::Backward => Triple::new(x, self.predicate.clone(), node.clone()),
        }
    }

    /// `SELECT ?x WHERE { <node> <p> ?x }` or the backward form.
    pub fn select_query(&self, node: &Iri) -> String {
        match self.direction {
            Direction::Forward => format!("SELECT ?x WHERE {{ {node} {} ?x }}", self.predicate),
            Direction::Backward => format!("SELECT ?x WHERE {{ ?x {} {node} }}", self.predicate),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            Direction::Forward => write!(f, "{}", self.predicate),
            Direction::Backward => write!(f, "^{}", self.predicate),
        }
    }
}

pub trait Endpoint: Send + Sync {
    fn name(&self) -> &str;
    fn select(&self, node: &Iri, pattern: &Pattern) -> Result<Vec<Term>, SourceError>;
}

/// SPARQL protocol client: `GET ?query=...` with JSON results.
pub struct SparqlEndpoint {
    url: String,
    agent: ureq::Agent,
}

impl SparqlEndpoint {
    pub fn new(url: impl Into<String>) -> Self {
        Self::with_timeout(url, Duration::from_secs(30))
    }

    pub fn with_timeout(url: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        SparqlEndpoint { url: url.into(), agent }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl Endpoint for SparqlEndpoint {
    fn name(&self) -> &str {
        "sparql"
    }

    fn select(&self, node: &Iri, pattern: &Pattern) -> Result<Vec<Term>, SourceError> {
        let response = self
            .agent
            .get(&self.url)
            .query("query", pattern.select_query(node))
            .header("Accept", "application/sparql-results+json")
            .call()
            .map_err(super::http::transport_error)?;
        let status = response.status().as_u16();
        if status >= 400 {
            return Err(SourceError::Status(status));
        }
        let body = response
            .into_body()
            .read_to_string()
            .map_err(super::http::transport_error)?;
        parse_results_json(&body, "x")
    }
}

/// Extracts the bindings of `var` from a SPARQL JSON results document.
/// Blank node bindings are skipped.
pub fn parse_results_json(text: &str, var: &str) -> Result<Vec<Term>, SourceError> {
    let json: Value = serde_json::from_str(text).map_err(|e| SourceError::Endpoint(e.to_string()))?;
    let bindings = json
        .pointer("/results/bindings")
        .and_then(Value::as_array)
        .ok_or_else(|| SourceError::Endpoint("missing results.bindings".into()))?;
    let mut out = Vec::new();
    for binding in bindings {
        let Some(cell) = binding.get(var) else {
            continue;
        };
        let field = |name: &str| cell.get(name).and_then(Value::as_str);
        let value = field("value").ok_or_else(|| SourceError::Endpoint("binding without value".into()))?;
        let term = match field("type") {
            Some("uri") => Term::iri(value),
            Some("literal" | "typed-literal") => {
                if let Some(lang) = field("xml:lang") {
                    Term::Literal(Literal::lang(value, lang))
                } else if let Some(dt) = field("datatype") {
                    Term::Literal(Literal::typed(value, Iri::new(dt)))
                } else {
                    Term::literal(value)
                }
            }
            Some("bnode") => continue,
            other => return Err(SourceError::Endpoint(format!("unknown binding type {other:?}"))),
        };
        out.push(term);
    }
    Ok(out)
}

/// An endpoint answering from an in-memory graph.
pub struct GraphEndpoint {
    graph: Document,
}

impl GraphEndpoint {
    pub fn new(graph: Document) -> Self {
        GraphEndpoint { graph }
    }
}

impl Endpoint for GraphEndpoint {
    fn name(&self) -> &str {
        "graph-endpoint"
    }

    fn select(&self, node: &Iri, pattern: &Pattern) -> Result<Vec<Term>, SourceError> {
        let node = Term::Iri(node.clone());
        Ok(self
            .graph
            .iter()
            .filter(|t| t.predicate == pattern.predicate)
            .filter_map(|t| match pattern.direction {
                Direction::Forward if t.subject == node => Some(t.object.clone()),
                Direction::Backward if t.object == node => Some(t.subject.clone()),
                _ => None,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_queries() {
        let node = Iri::new("http://ex.org/alice");
        assert_eq!(
            Pattern::forward("http://p").select_query(&node),
            "SELECT ?x WHERE { <http://ex.org/alice> <http://p> ?x }"
        );
        assert_eq!(
            Pattern::backward("http://p").select_query(&node),
            "SELECT ?x WHERE { ?x <http://p> <http://ex.org/alice> }"
        );
    }

    #[test]
    fn results_json() {
        let text = r#"{"head":{"vars":["x"]},"results":{"bindings":[
            {"x":{"type":"uri","value":"http://a"}},
            {"x":{"type":"literal","value":"hi","xml:lang":"en"}},
            {"x":{"type":"bnode","value":"b0"}},
            {"x":{"type":"typed-literal","value":"1","datatype":"http://www.w3.org/2001/XMLSchema#integer"}}
        ]}}"#;
        let terms = parse_results_json(text, "x").unwrap();
        assert_eq!(terms.len(), 3);
        assert_eq!(terms[0], Term::iri("http://a"));
        assert_eq!(terms[1], Term::Literal(Literal::lang("hi", "en")));
        assert!(parse_results_json("{}", "x").is_err());
        assert!(parse_results_json("not json", "x").is_err());
    }

    #[test]
    fn graph_endpoint_directions() {
        let g: Document = [Triple::new(
            Term::iri("http://p1"),
            "http://c",
            Term::iri("http://alice"),
        )]
        .into_iter()
        .collect();
        let ep = GraphEndpoint::new(g);
        let alice = Iri::new("http://alice");
        assert_eq!(
            ep.select(&alice, &Pattern::backward("http://c")).unwrap(),
            vec![Term::iri("http://p1")]
        );
        assert!(ep.select(&alice, &Pattern::forward("http://c")).unwrap().is_empty());
    }
}
