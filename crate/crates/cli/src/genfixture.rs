//! Synthetic fixtures.
//!
//! * `star(n)`: a hub author with `n` papers, each shared with one distinct
//!   coauthor, and each coauthor with one solo paper. Every paper and author
//!   document carries an `rdfs:label`.
//! * `chain(n)`: `n + 1` authors where neighbours share one paper.
//! * `grid(rows, cols)`: a lattice linked by `:link` to the right and downward.
//!
//! The seed permutes how generated names are numbered, so the shapes are
//! fixed while the IRIs a search meets first are not.

use std::fmt;
use std::str::FromStr;

use ldpath::path::PrefixTable;
use ldpath::{Iri, Literal, Term, Triple, WebFixture};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const NS: &str = "http://example.org/gen/";
pub const CREATOR: &str = "http://purl.org/dc/elements/1.1/creator";
pub const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const LINK: &str = "http://example.org/gen/link";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Star(usize),
    Chain(usize),
    Grid(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("{0} needs a positive size")]
    Empty(&'static str),
    #[error("cannot parse shape '{0}' (expected star:N, chain:N or grid:RxC)")]
    Syntax(String),
}

impl Shape {
    pub fn validate(self) -> Result<Self, ShapeError> {
        match self {
            Shape::Star(0) => Err(ShapeError::Empty("star")),
            Shape::Chain(0) => Err(ShapeError::Empty("chain")),
            Shape::Grid(r, c) if r == 0 || c == 0 => Err(ShapeError::Empty("grid")),
            ok => Ok(ok),
        }
    }
}

impl FromStr for Shape {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ShapeError::Syntax(s.to_string());
        let (kind, size) = s.split_once(':').ok_or_else(bad)?;
        let shape = match kind {
            "star" => Shape::Star(size.parse().map_err(|_| bad())?),
            "chain" => Shape::Chain(size.parse().map_err(|_| bad())?),
            "grid" => {
                let (r, c) = size.split_once('x').ok_or_else(bad)?;
                Shape::Grid(r.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?)
            }
            _ => return Err(bad()),
        };
        shape.validate()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Star(n) => write!(f, "star:{n}"),
            Shape::Chain(n) => write!(f, "chain:{n}"),
            Shape::Grid(r, c) => write!(f, "grid:{r}x{c}"),
        }
    }
}

pub fn generate(shape: Shape, seed: u64) -> Result<WebFixture, ShapeError> {
    Ok(match shape.validate()? {
        Shape::Star(n) => star(n, seed),
        Shape::Chain(n) => chain(n, seed),
        Shape::Grid(r, c) => grid(r, c),
    })
}

pub fn iri(local: &str) -> Iri {
    Iri::new(format!("{NS}{local}"))
}

fn term(local: &str) -> Term {
    Term::Iri(iri(local))
}

fn prefixes() -> PrefixTable {
    let mut p = PrefixTable::common();
    p.insert("", NS).expect("fresh label");
    p
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ids
}

/// Collects triples into per-IRI documents; `add` files a triple under the
/// given owners.
struct Builder {
    fixture: WebFixture,
}

impl Builder {
    fn new() -> Self {
        let mut fixture = WebFixture::new();
        fixture.prefixes = prefixes();
        Builder { fixture }
    }

    fn add(&mut self, triple: &Triple, owners: &[&str]) {
        for owner in owners {
            self.fixture.docs.entry(iri(owner)).or_default().insert(triple.clone());
        }
    }

    fn wrote(&mut self, paper: &str, author: &str) {
        let t = Triple::new(term(paper), CREATOR, term(author));
        self.add(&t, &[paper, author]);
    }

    fn label(&mut self, local: &str, text: String) {
        let t = Triple::new(term(local), LABEL, Literal::simple(text));
        self.add(&t, &[local]);
    }
}

pub fn star(n: usize, seed: u64) -> WebFixture {
    let ids = permutation(n, seed);
    let mut b = Builder::new();
    b.label("hub", "Hub Author".into());
    for (i, &c) in ids.iter().enumerate() {
        let (paper, coauthor, solo) = (format!("paper{i}"), format!("author{c}"), format!("solo{c}"));
        b.wrote(&paper, "hub");
        b.wrote(&paper, &coauthor);
        b.wrote(&solo, &coauthor);
        b.label(&paper, format!("Paper {i}"));
        b.label(&coauthor, format!("Author {c}"));
        b.label(&solo, format!("Solo paper {c}"));
    }
    b.fixture
}

pub fn chain(n: usize, seed: u64) -> WebFixture {
    let ids = permutation(n + 1, seed);
    let mut b = Builder::new();
    for i in 0..n {
        let paper = format!("paper{i}");
        b.wrote(&paper, &format!("author{}", ids[i]));
        b.wrote(&paper, &format!("author{}", ids[i + 1]));
    }
    b.fixture
}

pub fn grid(rows: usize, cols: usize) -> WebFixture {
    let mut b = Builder::new();
    let cell = |r: usize, c: usize| format!("g{r}_{c}");
    for r in 0..rows {
        for c in 0..cols {
            // documents exist even for isolated cells
            b.fixture.docs.entry(iri(&cell(r, c))).or_default();
            let here = cell(r, c);
            let mut link = |there: String| {
                let t = Triple::new(term(&here), LINK, term(&there));
                b.add(&t, &[&here, &there]);
            };
            if c + 1 < cols {
                link(cell(r, c + 1));
            }
            if r + 1 < rows {
                link(cell(r + 1, c));
            }
        }
    }
    b.fixture
}
