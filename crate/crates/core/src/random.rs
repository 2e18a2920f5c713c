//! Seeded random graphs and path expressions for property testing.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::path::PathExpr;
use crate::term::{Document, Iri, Term, Triple};

pub const NS: &str = "http://example.org/r/";

pub fn node(i: usize) -> Term {
    Term::iri(format!("{NS}n{i}"))
}

pub fn predicate(i: usize) -> Iri {
    Iri::new(format!("{NS}p{i}"))
}

/// Up to `edges` random triples over `nodes` IRIs and `predicates`
/// predicates. Roughly one object in ten is one of `literals` literals.
pub fn graph(rng: &mut impl Rng, nodes: usize, literals: usize, predicates: usize, edges: usize) -> Document {
    (0..edges)
        .map(|_| {
            let s = node(rng.random_range(0..nodes));
            let p = predicate(rng.random_range(0..predicates));
            let o = if literals > 0 && rng.random_bool(0.1) {
                Term::literal(format!("v{}", rng.random_range(0..literals)))
            } else {
                node(rng.random_range(0..nodes))
            };
            Triple::new(s, p, o)
        })
        .collect()
}

/// A random expression of depth at most `depth` over `predicates` atoms.
pub fn expr(rng: &mut impl Rng, depth: usize, predicates: usize) -> PathExpr {
    let atom = PathExpr::atom(predicate(rng.random_range(0..predicates)));
    if depth <= 1 {
        return atom;
    }
    if rng.random_bool(0.25) {
        return if rng.random_bool(0.3) {
            PathExpr::inverse(atom)
        } else {
            atom
        };
    }
    let sub = |rng: &mut _| expr(rng, depth - 1, predicates);
    match [0u8, 1, 2, 3, 4].choose(rng).copied().unwrap_or_default() {
        0 => PathExpr::inverse(sub(rng)),
        1 => PathExpr::concat(sub(rng), sub(rng)),
        2 => PathExpr::alt(sub(rng), sub(rng)),
        3 => PathExpr::star(sub(rng)),
        _ => PathExpr::opt(sub(rng)),
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Document,
    pub expr: PathExpr,
    pub seed: Iri,
}

/// A graph with at most 12 nodes and 4 predicates, an expression of depth at
/// most 4 and a seed IRI of the graph, all derived from `seed`.
///
/// Literals are never dereferenced, so a search cannot step backwards out of
/// one. Expressions that would traverse a literal-valued predicate inverted
/// are redrawn, which keeps the instance answerable by link traversal.
pub fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.random_range(2..=12);
    let predicates = rng.random_range(1..=4);
    let edges = rng.random_range(1..=nodes * 2);
    let literals = (12 - nodes).min(3);
    let graph = graph(&mut rng, nodes, literals, predicates, edges);
    let literal_valued: BTreeSet<&Iri> = graph
        .iter()
        .filter(|t| t.object.is_literal())
        .map(|t| &t.predicate)
        .collect();
    let expr = loop {
        let e = expr(&mut rng, 4, predicates);
        if inverted_atoms(&e.normalize_inverse()).all(|p| !literal_valued.contains(p)) {
            break e;
        }
    };
    let subjects: Vec<&Iri> = graph.iter().filter_map(|t| t.subject.as_iri()).collect();
    let seed = (*subjects.choose(&mut rng).expect("at least one edge")).clone();
    Instance { graph, expr, seed }
}

/// Predicates under an `Inverse` in an inverse-normal expression.
fn inverted_atoms(expr: &PathExpr) -> Box<dyn Iterator<Item = &Iri> + '_> {
    match expr {
        PathExpr::Atom(_) => Box::new(std::iter::empty()),
        PathExpr::Inverse(inner) => match &**inner {
            PathExpr::Atom(p) => Box::new(std::iter::once(p)),
            other => inverted_atoms(other),
        },
        PathExpr::Star(e) | PathExpr::Opt(e) => inverted_atoms(e),
        PathExpr::Concat(l, r) | PathExpr::Alt(l, r) => Box::new(inverted_atoms(l).chain(inverted_atoms(r))),
    }
}
