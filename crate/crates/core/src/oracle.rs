//! Reference evaluators used to check the search engine.
//!
//! [`eval_semantics`] evaluates an expression by direct recursion over binary
//! relations, with no automaton involved. [`eval_product`] materializes the
//! product of a graph and an automaton and runs breadth-first search on it.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::nfa::{Nfa, StateId};
use crate::path::PathExpr;
use crate::term::{Document, Term};

pub type Relation = BTreeSet<(Term, Term)>;

/// Subjects and objects of the graph.
pub fn graph_terms(graph: &Document) -> BTreeSet<Term> {
    graph
        .iter()
        .flat_map(|t| [t.subject.clone(), t.object.clone()])
        .collect()
}

/// The pair relation an expression denotes over a finite graph.
pub fn eval_semantics(expr: &PathExpr, graph: &Document) -> Relation {
    let terms = graph_terms(graph);
    eval_rel(expr, graph, &terms)
}

fn eval_rel(expr: &PathExpr, graph: &Document, terms: &BTreeSet<Term>) -> Relation {
    match expr {
        PathExpr::Atom(iri) => graph
            .iter()
            .filter(|t| &t.predicate == iri)
            .map(|t| (t.subject.clone(), t.object.clone()))
            .collect(),
        PathExpr::Inverse(inner) => eval_rel(inner, graph, terms).into_iter().map(|(s, o)| (o, s)).collect(),
        PathExpr::Concat(l, r) => compose(&eval_rel(l, graph, terms), &eval_rel(r, graph, terms)),
        PathExpr::Alt(l, r) => {
            let mut out = eval_rel(l, graph, terms);
            out.extend(eval_rel(r, graph, terms));
            out
        }
        PathExpr::Opt(inner) => {
            let mut out = eval_rel(inner, graph, terms);
            out.extend(identity(terms));
            out
        }
        PathExpr::Star(inner) => {
            let step = eval_rel(inner, graph, terms);
            let mut closure: Relation = identity(terms).collect();
            closure.extend(step.iter().cloned());
            loop {
                let next = compose(&closure, &step);
                let before = closure.len();
                closure.extend(next);
                if closure.len() == before {
                    return closure;
                }
            }
        }
    }
}

fn identity(terms: &BTreeSet<Term>) -> impl Iterator<Item = (Term, Term)> + '_ {
    terms.iter().map(|t| (t.clone(), t.clone()))
}

fn compose(left: &Relation, right: &Relation) -> Relation {
    let mut by_first: HashMap<&Term, Vec<&Term>> = HashMap::new();
    for (a, b) in right {
        by_first.entry(a).or_default().push(b);
    }
    let mut out = Relation::new();
    for (a, b) in left {
        if let Some(cs) = by_first.get(b) {
            for c in cs {
                out.insert((a.clone(), (*c).clone()));
            }
        }
    }
    out
}

/// Shortest product-edge count from `(start, initial)` to any goal node
/// `(v, final)`, per answer term `v`.
pub fn eval_product(nfa: &Nfa, graph: &Document, start: &Term) -> BTreeMap<Term, u32> {
    let mut adjacency: HashMap<(Term, StateId), Vec<(Term, StateId)>> = HashMap::new();
    for triple in graph {
        for t in nfa.transitions() {
            if t.label.iri != triple.predicate {
                continue;
            }
            let (from, to) = if t.label.inverse {
                (&triple.object, &triple.subject)
            } else {
                (&triple.subject, &triple.object)
            };
            adjacency
                .entry((from.clone(), t.from))
                .or_default()
                .push((to.clone(), t.to));
        }
    }
    let edges = adjacency
        .iter()
        .flat_map(|(from, tos)| tos.iter().map(move |to| (from.clone(), to.clone())));
    product_goal_costs(edges, start, nfa)
}

/// Breadth-first search over an explicit product edge list.
pub fn product_goal_costs(
    edges: impl IntoIterator<Item = ((Term, StateId), (Term, StateId))>,
    start: &Term,
    nfa: &Nfa,
) -> BTreeMap<Term, u32> {
    let mut adjacency: HashMap<(Term, StateId), Vec<(Term, StateId)>> = HashMap::new();
    for (from, to) in edges {
        adjacency.entry(from).or_default().push(to);
    }
    let origin = (start.clone(), nfa.initial());
    let mut dist: HashMap<(Term, StateId), u32> = HashMap::from([(origin.clone(), 0)]);
    let mut queue = VecDeque::from([origin]);
    let mut answers: BTreeMap<Term, u32> = BTreeMap::new();
    while let Some(node) = queue.pop_front() {
        let d = dist[&node];
        if nfa.is_final(node.1) {
            answers.entry(node.0.clone()).or_insert(d);
        }
        for next in adjacency.get(&node).into_iter().flatten() {
            if !dist.contains_key(next) {
                dist.insert(next.clone(), d + 1);
                queue.push_back(next.clone());
            }
        }
    }
    answers
}

/// One cost per distinct answer term, ascending; the k-th entry is the cost of
/// the k-th answer an optimal search reports.
pub fn k_shortest_goal_costs(nfa: &Nfa, graph: &Document, start: &Term) -> Vec<u32> {
    sorted_costs(&eval_product(nfa, graph, start))
}

pub fn sorted_costs(answers: &BTreeMap<Term, u32>) -> Vec<u32> {
    let mut costs: Vec<u32> = answers.values().copied().collect();
    costs.sort_unstable();
    costs
}
