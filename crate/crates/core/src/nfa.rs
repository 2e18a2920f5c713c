//! ε-free automata over IRIs and inverted IRIs.
//!
//! Compilation runs a Thompson construction, removes ε edges through
//! ε-closures, merges bisimilar states and renumbers the result breadth-first
//! from the initial state. Numbering is a pure function of the expression.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::path::{PathExpr, PrefixTable};
use crate::term::Iri;

pub type StateId = usize;

/// Outgoing (label, target block) pairs of a state during refinement.
type Signature = BTreeSet<(Label, usize)>;

/// A transition label: an IRI traversed forwards or, when `inverse`, backwards.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub iri: Iri,
    pub inverse: bool,
}

impl Label {
    pub fn forward(iri: impl Into<Iri>) -> Self {
        Label {
            iri: iri.into(),
            inverse: false,
        }
    }

    pub fn backward(iri: impl Into<Iri>) -> Self {
        Label {
            iri: iri.into(),
            inverse: true,
        }
    }

    pub fn inverted(&self) -> Self {
        Label {
            iri: self.iri.clone(),
            inverse: !self.inverse,
        }
    }

    /// `dc:creator` or `^dc:creator`.
    pub fn show(&self, prefixes: &PrefixTable) -> String {
        let iri = prefixes.show(&self.iri);
        if self.inverse {
            format!("^{iri}")
        } else {
            iri
        }
    }

    /// Inverse of [`Label::show`].
    pub fn parse(text: &str, prefixes: &PrefixTable) -> Option<Label> {
        match text.strip_prefix('^') {
            Some(rest) => prefixes.expand(rest).map(Label::backward),
            None => prefixes.expand(text).map(Label::forward),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            f.write_str("^")?;
        }
        fmt::Display::fmt(&self.iri, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: StateId,
    pub label: Label,
    pub to: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NfaError {
    #[error("automaton has no states")]
    NoStates,
    #[error("state {0} out of range")]
    StateOutOfRange(StateId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    num_states: usize,
    initial: StateId,
    finals: BTreeSet<StateId>,
    transitions: Vec<Transition>,
    // outgoing transitions per state, sorted by (label, target)
    outgoing: Vec<Vec<(Label, StateId)>>,
}

impl Nfa {
    /// Builds an automaton from explicit parts, validating state ids.
    pub fn from_parts(
        num_states: usize,
        initial: StateId,
        finals: impl IntoIterator<Item = StateId>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self, NfaError> {
        if num_states == 0 {
            return Err(NfaError::NoStates);
        }
        let check = |s: StateId| {
            if s < num_states {
                Ok(s)
            } else {
                Err(NfaError::StateOutOfRange(s))
            }
        };
        check(initial)?;
        let finals = finals.into_iter().map(check).collect::<Result<BTreeSet<_>, _>>()?;
        let transitions: BTreeSet<Transition> = transitions.into_iter().collect();
        let mut outgoing = vec![Vec::new(); num_states];
        for t in &transitions {
            check(t.from)?;
            check(t.to)?;
            outgoing[t.from].push((t.label.clone(), t.to));
        }
        for out in &mut outgoing {
            out.sort();
        }
        Ok(Nfa {
            num_states,
            initial,
            finals,
            transitions: transitions.into_iter().collect(),
            outgoing,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.finals.contains(&state)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn outgoing(&self, state: StateId) -> &[(Label, StateId)] {
        &self.outgoing[state]
    }

    /// Runs the automaton on a label word.
    pub fn accepts(&self, word: &[Label]) -> bool {
        let mut current = BTreeSet::from([self.initial]);
        for label in word {
            current = current
                .iter()
                .flat_map(|&q| self.outgoing[q].iter())
                .filter(|(l, _)| l == label)
                .map(|&(_, to)| to)
                .collect();
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|q| self.is_final(*q))
    }

    /// Text edge list: `initial: n`, `finals: a,b`, then `from\tlabel\tto`
    /// per transition.
    pub fn dump(&self, prefixes: &PrefixTable) -> String {
        let finals: Vec<String> = self.finals.iter().map(ToString::to_string).collect();
        let mut out = format!("initial: {}\nfinals: {}\n", self.initial, finals.join(","));
        for t in &self.transitions {
            out.push_str(&format!("{}\t{}\t{}\n", t.from, t.label.show(prefixes), t.to));
        }
        out
    }
}

/// Compiles a path expression into an ε-free automaton with initial state 0.
pub fn compile(expr: &PathExpr) -> Nfa {
    let expr = expr.normalize_inverse();
    let mut thompson = Thompson::default();
    let (start, end) = thompson.build(&expr);
    let eps_free = thompson.eliminate_epsilon(start, end);
    eps_free.quotient().renumbered()
}

#[derive(Default)]
struct Thompson {
    eps: Vec<Vec<usize>>,
    sym: Vec<Vec<(Label, usize)>>,
}

impl Thompson {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.sym.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, expr: &PathExpr) -> (usize, usize) {
        match expr {
            PathExpr::Atom(iri) => self.symbol(Label::forward(iri.clone())),
            PathExpr::Inverse(inner) => match &**inner {
                PathExpr::Atom(iri) => self.symbol(Label::backward(iri.clone())),
                other => unreachable!("inverse over {other:?} after normalization"),
            },
            PathExpr::Concat(l, r) => {
                let (ls, le) = self.build(l);
                let (rs, re) = self.build(r);
                self.eps[le].push(rs);
                (ls, re)
            }
            PathExpr::Alt(l, r) => {
                let s = self.state();
                let (ls, le) = self.build(l);
                let (rs, re) = self.build(r);
                let e = self.state();
                self.eps[s].extend([ls, rs]);
                self.eps[le].push(e);
                self.eps[re].push(e);
                (s, e)
            }
            PathExpr::Star(inner) => {
                let s = self.state();
                let (is, ie) = self.build(inner);
                let e = self.state();
                self.eps[s].extend([is, e]);
                self.eps[ie].extend([is, e]);
                (s, e)
            }
            PathExpr::Opt(inner) => {
                let s = self.state();
                let (is, ie) = self.build(inner);
                let e = self.state();
                self.eps[s].extend([is, e]);
                self.eps[ie].push(e);
                (s, e)
            }
        }
    }

    fn symbol(&mut self, label: Label) -> (usize, usize) {
        let s = self.state();
        let e = self.state();
        self.sym[s].push((label, e));
        (s, e)
    }

    fn closure(&self, state: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([state]);
        let mut stack = vec![state];
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s] {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Keeps the start state and every target of a symbol edge.
    fn eliminate_epsilon(&self, start: usize, end: usize) -> RawNfa {
        let mut kept: BTreeSet<usize> = BTreeSet::from([start]);
        kept.extend(self.sym.iter().flatten().map(|(_, t)| *t));
        let mut raw = RawNfa {
            states: kept.iter().copied().collect(),
            initial: start,
            finals: BTreeSet::new(),
            edges: BTreeMap::new(),
        };
        for &p in &kept {
            let closure = self.closure(p);
            if closure.contains(&end) {
                raw.finals.insert(p);
            }
            let edges: BTreeSet<(Label, usize)> = closure.iter().flat_map(|&q| self.sym[q].iter().cloned()).collect();
            raw.edges.insert(p, edges);
        }
        raw
    }
}

/// Intermediate automaton keyed by construction-time state ids.
struct RawNfa {
    states: Vec<usize>,
    initial: usize,
    finals: BTreeSet<usize>,
    edges: BTreeMap<usize, BTreeSet<(Label, usize)>>,
}

impl RawNfa {
    /// Merges states with identical finality and identical outgoing
    /// (label, block) signatures until the partition is stable. Each block is
    /// named by its smallest member.
    fn quotient(&self) -> RawNfa {
        let mut block: HashMap<usize, usize> = self
            .states
            .iter()
            .map(|&s| (s, usize::from(self.finals.contains(&s))))
            .collect();
        loop {
            let mut signatures: BTreeMap<(usize, Signature), Vec<usize>> = BTreeMap::new();
            for &s in &self.states {
                let sig: Signature = self.edges[&s].iter().map(|(l, t)| (l.clone(), block[t])).collect();
                signatures.entry((block[&s], sig)).or_default().push(s);
            }
            let next: HashMap<usize, usize> = signatures
                .values()
                .enumerate()
                .flat_map(|(i, members)| members.iter().map(move |&s| (s, i)))
                .collect();
            let stable = signatures.len() == distinct(&block);
            block = next;
            if stable {
                break;
            }
        }
        let mut representative: HashMap<usize, usize> = HashMap::new();
        for &s in &self.states {
            let rep = representative.entry(block[&s]).or_insert(s);
            *rep = (*rep).min(s);
        }
        let rep = |s: usize| representative[&block[&s]];
        let mut out = RawNfa {
            states: Vec::new(),
            initial: rep(self.initial),
            finals: self.finals.iter().map(|&s| rep(s)).collect(),
            edges: BTreeMap::new(),
        };
        for &s in &self.states {
            let r = rep(s);
            let edges: BTreeSet<(Label, usize)> = self.edges[&s].iter().map(|(l, t)| (l.clone(), rep(*t))).collect();
            out.edges.entry(r).or_default().extend(edges);
        }
        out.states = out.edges.keys().copied().collect();
        out
    }

    /// Breadth-first numbering from the initial state; edges are visited in
    /// (label, old id) order. Unreachable states are dropped.
    fn renumbered(&self) -> Nfa {
        let mut ids: HashMap<usize, StateId> = HashMap::from([(self.initial, 0)]);
        let mut order = vec![self.initial];
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for (_, t) in &self.edges[&s] {
                if !ids.contains_key(t) {
                    ids.insert(*t, order.len());
                    order.push(*t);
                    queue.push_back(*t);
                }
            }
        }
        let transitions = order.iter().flat_map(|s| {
            let ids = &ids;
            self.edges[s].iter().map(move |(label, t)| Transition {
                from: ids[s],
                label: label.clone(),
                to: ids[t],
            })
        });
        let finals = self.finals.iter().filter_map(|s| ids.get(s).copied());
        Nfa::from_parts(order.len(), 0, finals, transitions.collect::<Vec<_>>()).expect("renumbered ids are dense")
    }
}

fn distinct(block: &HashMap<usize, usize>) -> usize {
    block.values().collect::<BTreeSet<_>>().len()
}
