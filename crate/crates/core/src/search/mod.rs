//! Streaming DFS, BFS and A* over the product of the Web graph and a query
//! automaton.
//!
//! A [`Search`] is an iterator of [`Solution`]s. Nodes of the product are
//! generated lazily by dereferencing their terms. Each answer term is reported
//! once, with the path that first reached it.

mod config;
mod discovered;
mod events;
mod frontier;

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use config::{Algorithm, ConfigError, Emission, Limits, SearchConfig, UnknownName};
pub use discovered::DiscoveredGraph;
pub use events::{Event, EventKind, EventLog, CSV_HEADER};
use frontier::{Frontier, NodeId};

use crate::heuristic::{Distance, HeuristicKind, HeuristicTable};
use crate::nfa::{Label, Nfa, StateId};
use crate::parallel::{self, BatchTrace, ConcurrencyTrace};
use crate::path::PrefixTable;
use crate::source::{Outcome, Pattern, RequestLog, RequestRecord, Session, Source};
use crate::term::{Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductNode {
    pub term: Term,
    pub state: StateId,
}

impl ProductNode {
    pub fn new(term: impl Into<Term>, state: StateId) -> Self {
        ProductNode {
            term: term.into(),
            state,
        }
    }
}

impl fmt::Display for ProductNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, q{})", self.term, self.state)
    }
}

/// A path through the product from the start node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPath {
    pub start: ProductNode,
    pub hops: Vec<(Label, ProductNode)>,
}

impl WitnessPath {
    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn end(&self) -> &ProductNode {
        self.hops.last().map_or(&self.start, |(_, n)| n)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.hops.iter().map(|(l, _)| l.clone()).collect()
    }

    /// Consecutive product edges along the path.
    pub fn edges(&self) -> impl Iterator<Item = (&ProductNode, &Label, &ProductNode)> + '_ {
        let froms = std::iter::once(&self.start).chain(self.hops.iter().map(|(_, n)| n));
        froms.zip(&self.hops).map(|(from, (label, to))| (from, label, to))
    }

    /// `seed ^label term label term ...` on one line.
    pub fn show(&self, prefixes: &PrefixTable) -> String {
        let mut out = show_term(&self.start.term, prefixes);
        for (label, node) in &self.hops {
            out.push(' ');
            out.push_str(&label.show(prefixes));
            out.push(' ');
            out.push_str(&show_term(&node.term, prefixes));
        }
        out
    }
}

pub fn show_term(term: &Term, prefixes: &PrefixTable) -> String {
    match term {
        Term::Iri(iri) => prefixes.show(iri),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub answer: Term,
    pub cost: u32,
    pub path: WitnessPath,
    /// Zero-based emission index.
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    Exhausted,
    MaxAnswers,
    MaxTriples,
    Timeout,
}

impl StopReason {
    pub fn is_truncated(self) -> bool {
        self != StopReason::Exhausted
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Exhausted => "exhausted",
            StopReason::MaxAnswers => "max-answers",
            StopReason::MaxTriples => "max-triples",
            StopReason::Timeout => "timeout",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("node {0} was not generated in this run")]
    UnknownNode(ProductNode),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expansions: usize,
    pub generated: usize,
    /// Open nodes whose g value dropped after generation.
    pub g_improvements: usize,
    /// Cheaper paths found to already closed nodes; these are not reopened.
    pub closed_improvements: usize,
    pub batches: usize,
    pub triples: usize,
}

/// Successors of one node plus the request records its dereference produced.
#[derive(Debug, Clone, Default)]
pub struct Expansion {
    pub successors: Vec<(Label, ProductNode)>,
    pub records: Vec<RequestRecord>,
}

impl Expansion {
    /// Triples delivered by fresh (non-cached) requests.
    pub fn fetched_triples(&self) -> usize {
        self.records.iter().filter(|r| r.is_request()).map(|r| r.triples).sum()
    }
}

fn pattern_for(label: &Label) -> Pattern {
    if label.inverse {
        Pattern::backward(label.iri.clone())
    } else {
        Pattern::forward(label.iri.clone())
    }
}

/// Product successors of `node`, sorted by (label, term, target state).
/// States without outgoing transitions are not dereferenced at all.
pub fn neighbours(node: &ProductNode, nfa: &Nfa, session: &Session, batch: u64) -> Expansion {
    let outgoing = nfa.outgoing(node.state);
    if outgoing.is_empty() {
        return Expansion::default();
    }
    let patterns: Vec<Pattern> = if session.has_endpoint() {
        outgoing
            .iter()
            .map(|(label, _)| pattern_for(label))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    } else {
        Vec::new()
    };
    let fetch = session.dereference(&node.term, &patterns, batch);
    let mut found = BTreeSet::new();
    for (label, to) in outgoing {
        for triple in fetch.document.iter().filter(|t| t.predicate == label.iri) {
            let next = if label.inverse {
                (triple.object == node.term).then_some(&triple.subject)
            } else {
                (triple.subject == node.term).then_some(&triple.object)
            };
            if let Some(term) = next {
                found.insert((label.clone(), term.clone(), *to));
            }
        }
    }
    Expansion {
        successors: found
            .into_iter()
            .map(|(label, term, state)| (label, ProductNode { term, state }))
            .collect(),
        records: fetch.records,
    }
}

#[derive(Debug, Clone)]
struct NodeMeta {
    g: Option<u32>,
    f: Distance,
    parent: Option<(NodeId, Label)>,
    /// Sequence number of the live frontier entry, if the node is open.
    open_seq: Option<u64>,
    closed: bool,
    emitted: bool,
}

/// What a finished (or abandoned) run leaves behind.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub stop: Option<StopReason>,
    pub events: EventLog,
    pub discovered: DiscoveredGraph,
    pub requests: RequestLog,
    pub trace: ConcurrencyTrace,
    pub stats: SearchStats,
    pub elapsed: Duration,
}

impl RunSummary {
    pub fn truncated(&self) -> bool {
        self.stop.is_some_and(StopReason::is_truncated)
    }
}

pub struct Search<'a> {
    config: SearchConfig,
    emission: Emission,
    nfa: &'a Nfa,
    heuristics: &'a HeuristicTable,
    seed: Term,
    session: Session,
    keys: Vec<ProductNode>,
    nodes: Vec<NodeMeta>,
    index: HashMap<ProductNode, NodeId>,
    frontier: Frontier,
    next_seq: u64,
    /// Goal nodes found by A* whose emission waits until no cheaper answer
    /// can still appear. Only batches of more than one node ever hold a goal
    /// past the point where it was found.
    held: BinaryHeap<Reverse<(u32, u64, NodeId)>>,
    answered: HashSet<Term>,
    pending: VecDeque<Solution>,
    emitted: usize,
    events: EventLog,
    discovered: DiscoveredGraph,
    stats: SearchStats,
    batches: Vec<BatchTrace>,
    batch: u64,
    stop: Option<StopReason>,
    started: Instant,
}

impl<'a> Search<'a> {
    pub fn new(
        config: SearchConfig,
        nfa: &'a Nfa,
        heuristics: &'a HeuristicTable,
        seed: Iri,
        source: &Source,
    ) -> Result<Self, ConfigError> {
        config.validate()?;
        let frontier = match config.algorithm {
            Algorithm::Dfs => Frontier::Stack(Vec::new()),
            Algorithm::Bfs => Frontier::Queue(VecDeque::new()),
            Algorithm::AStar => Frontier::Priority(BinaryHeap::new()),
        };
        let mut search = Search {
            emission: config.effective_emission(),
            config,
            nfa,
            heuristics,
            seed: Term::Iri(seed),
            session: source.session(),
            keys: Vec::new(),
            nodes: Vec::new(),
            index: HashMap::new(),
            frontier,
            next_seq: 0,
            held: BinaryHeap::new(),
            answered: HashSet::new(),
            pending: VecDeque::new(),
            emitted: 0,
            events: EventLog::default(),
            discovered: DiscoveredGraph::default(),
            stats: SearchStats::default(),
            batches: Vec::new(),
            batch: 0,
            stop: None,
            started: Instant::now(),
        };
        let start = ProductNode::new(search.seed.clone(), nfa.initial());
        let id = search.add_node(start, Some(0), None);
        search.open(id);
        if config.algorithm != Algorithm::AStar && search.is_goal(id) {
            search.emit(id);
        }
        Ok(search)
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stop
    }

    pub fn events(&self) -> &EventLog {
        &self.events
    }

    pub fn discovered(&self) -> &DiscoveredGraph {
        &self.discovered
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn request_log(&self) -> RequestLog {
        self.session.log()
    }

    /// Walks parent pointers from `node` back to the start node.
    pub fn reconstruct_path(&self, node: &ProductNode) -> Result<WitnessPath, SearchError> {
        let id = *self
            .index
            .get(node)
            .ok_or_else(|| SearchError::UnknownNode(node.clone()))?;
        Ok(self.path_of(id))
    }

    /// Drains the remaining solutions and returns the run's records.
    pub fn finish(mut self) -> RunSummary {
        while self.next().is_some() {}
        self.summary()
    }

    /// The run's records without running it further.
    pub fn summary(&self) -> RunSummary {
        let requests = self.session.log();
        RunSummary {
            stop: self.stop,
            events: self.events.clone(),
            discovered: self.discovered.clone(),
            trace: ConcurrencyTrace::new(&self.batches, &requests),
            requests,
            stats: self.stats,
            elapsed: self.started.elapsed(),
        }
    }

    fn add_node(&mut self, key: ProductNode, g: Option<u32>, parent: Option<(NodeId, Label)>) -> NodeId {
        let id = self.keys.len();
        let f = match g {
            Some(g) => self.estimate(key.state) + g,
            None => Distance::Infinite,
        };
        self.index.insert(key.clone(), id);
        self.keys.push(key);
        self.nodes.push(NodeMeta {
            g,
            f,
            parent,
            open_seq: None,
            closed: false,
            emitted: false,
        });
        self.stats.generated += 1;
        id
    }

    fn estimate(&self, state: StateId) -> Distance {
        self.heuristics.get(self.config.heuristic, state)
    }

    fn is_goal(&self, id: NodeId) -> bool {
        self.nfa.is_final(self.keys[id].state)
    }

    fn seq(&mut self) -> u64 {
        self.next_seq += 1;
        self.next_seq - 1
    }

    fn open(&mut self, id: NodeId) {
        let seq = self.seq();
        self.nodes[id].open_seq = Some(seq);
        let f = self.nodes[id].f;
        match &mut self.frontier {
            Frontier::Stack(stack) => stack.push(id),
            Frontier::Queue(queue) => queue.push_back(id),
            priority => priority.push_priority(id, f, seq),
        }
    }

    fn pop(&mut self) -> Option<NodeId> {
        let nodes = &self.nodes;
        let id = self.frontier.pop(|id| nodes[id].open_seq)?;
        self.nodes[id].open_seq = None;
        Some(id)
    }

    /// Lower bound on the cost of any answer not yet found: the smallest f
    /// among open nodes and extracted nodes still waiting to be expanded.
    fn bound(&mut self, waiting: &[NodeId]) -> Distance {
        let nodes = &self.nodes;
        let top = self
            .frontier
            .top_f(|id| nodes[id].open_seq)
            .unwrap_or(Distance::Infinite);
        waiting.iter().map(|&id| self.nodes[id].f).fold(top, Distance::min)
    }

    fn path_of(&self, id: NodeId) -> WitnessPath {
        let mut hops = Vec::new();
        let mut cur = id;
        while let Some((parent, label)) = &self.nodes[cur].parent {
            hops.push((label.clone(), self.keys[cur].clone()));
            cur = *parent;
        }
        hops.reverse();
        WitnessPath {
            start: self.keys[cur].clone(),
            hops,
        }
    }

    fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    fn emit(&mut self, id: NodeId) {
        if self.nodes[id].emitted {
            return;
        }
        self.nodes[id].emitted = true;
        let key = &self.keys[id];
        if !self.answered.insert(key.term.clone()) {
            return;
        }
        let cost = self.nodes[id].g.expect("emitted nodes have been reached");
        let solution = Solution {
            answer: key.term.clone(),
            cost,
            path: self.path_of(id),
            index: self.emitted,
        };
        self.emitted += 1;
        let elapsed = self.elapsed();
        self.events.push(
            EventKind::Emission,
            key.term.clone(),
            Some(key.state),
            Some(cost),
            elapsed,
            self.batch,
        );
        self.pending.push_back(solution);
        if self.emitted >= self.config.limits.max_answers {
            self.stop = Some(StopReason::MaxAnswers);
        }
    }

    /// Emits held goals whose cost does not exceed `bound`, cheapest first.
    fn release(&mut self, bound: Distance) {
        while let Some(&Reverse((g, _, id))) = self.held.peek() {
            if self.stop.is_some() || Distance::Finite(g) > bound {
                return;
            }
            self.held.pop();
            self.emit(id);
        }
    }

    fn log_requests(&mut self, records: &[RequestRecord]) {
        for record in records {
            let kind = match record.outcome {
                Outcome::Ok => EventKind::Request,
                Outcome::Error(_) => EventKind::RequestError,
                Outcome::CacheHit => EventKind::CacheHit,
            };
            self.events.push(
                kind,
                Term::Iri(record.iri.clone()),
                None,
                None,
                record.started + record.wall,
                record.batch,
            );
        }
    }

    /// One iteration: extract up to k nodes, expand them (concurrently when
    /// k > 1) and merge their successors in extraction order.
    fn step(&mut self) {
        if self.elapsed() >= self.config.limits.max_wall_time {
            self.stop = Some(StopReason::Timeout);
            return;
        }
        let mut batch = Vec::with_capacity(self.config.parallelism);
        while batch.len() < self.config.parallelism {
            match self.pop() {
                Some(id) => batch.push(id),
                None => break,
            }
        }
        if batch.is_empty() {
            self.release(Distance::Infinite);
            if self.stop.is_none() {
                self.stop = Some(StopReason::Exhausted);
            }
            return;
        }
        self.batch += 1;
        let astar = self.config.algorithm == Algorithm::AStar;
        if astar {
            for &id in &batch {
                if self.is_goal(id) && !self.nodes[id].emitted {
                    let g = self.nodes[id].g.expect("open nodes have been reached");
                    let seq = self.seq();
                    self.held.push(Reverse((g, seq, id)));
                }
            }
            let bound = self.bound(&batch);
            self.release(bound);
            if self.stop.is_some() {
                return;
            }
        }

        let keys: Vec<ProductNode> = batch.iter().map(|&id| self.keys[id].clone()).collect();
        let t0 = Instant::now();
        let expansions = parallel::expand_all(&keys, self.nfa, &self.session, self.batch);
        self.batches.push(BatchTrace {
            id: self.batch,
            size: batch.len(),
            wall: t0.elapsed(),
            max_in_flight: 0,
        });
        self.stats.batches += 1;

        for (i, expansion) in expansions.into_iter().enumerate() {
            let id = batch[i];
            self.log_requests(&expansion.records);
            self.stats.triples += expansion.fetched_triples();
            self.nodes[id].closed = true;
            self.stats.expansions += 1;
            let elapsed = self.elapsed();
            self.events.push(
                EventKind::Expansion,
                keys[i].term.clone(),
                Some(keys[i].state),
                self.nodes[id].g,
                elapsed,
                self.batch,
            );
            for (label, to) in &expansion.successors {
                self.discovered.insert(keys[i].clone(), label.clone(), to.clone());
            }
            let waiting = &batch[i + 1..];
            if astar {
                self.merge_astar(id, expansion.successors, waiting);
            } else {
                self.merge_blind(id, expansion.successors);
            }
            if self.stop.is_some() {
                return;
            }
            if self.stats.triples > self.config.limits.max_triples {
                self.stop = Some(StopReason::MaxTriples);
                return;
            }
            if astar {
                let bound = self.bound(waiting);
                self.release(bound);
                if self.stop.is_some() {
                    return;
                }
            }
        }
    }

    /// DFS and BFS: unseen successors are emitted on generation if they are
    /// goals, then pushed. DFS pushes them in reverse so the first generated
    /// is expanded first.
    fn merge_blind(&mut self, from: NodeId, successors: Vec<(Label, ProductNode)>) {
        let g = self.nodes[from].g.expect("expanded nodes have been reached") + 1;
        let mut fresh = Vec::new();
        for (label, to) in successors {
            if self.index.contains_key(&to) {
                continue;
            }
            let id = self.add_node(to, Some(g), Some((from, label)));
            if self.is_goal(id) {
                self.emit(id);
                if self.stop.is_some() {
                    return;
                }
            }
            fresh.push(id);
        }
        if matches!(self.frontier, Frontier::Stack(_)) {
            fresh.reverse();
        }
        for id in fresh {
            self.open(id);
        }
    }

    fn merge_astar(&mut self, from: NodeId, successors: Vec<(Label, ProductNode)>, waiting: &[NodeId]) {
        let cost = self.nodes[from].g.expect("expanded nodes have been reached") + 1;
        for (label, to) in successors {
            let id = match self.index.get(&to) {
                Some(&id) => id,
                None => self.add_node(to, None, None),
            };
            let meta = &self.nodes[id];
            if meta.g.is_some_and(|g| g <= cost) {
                continue;
            }
            if meta.closed {
                self.stats.closed_improvements += 1;
                continue;
            }
            if meta.g.is_some() {
                self.stats.g_improvements += 1;
            }
            let state = self.keys[id].state;
            let f = self.estimate(state) + cost;
            let meta = &mut self.nodes[id];
            meta.g = Some(cost);
            meta.f = f;
            meta.parent = Some((from, label));

            if self.emission == Emission::Eager && self.is_goal(id) && !self.nodes[id].emitted {
                let sink =
                    self.config.heuristic == HeuristicKind::Pathmax && self.heuristics.pathmax(state).is_infinite();
                let bound = self.bound(waiting);
                if sink || Distance::Finite(cost) <= bound {
                    self.release(bound.min(Distance::Finite(cost)));
                    self.emit(id);
                    if self.stop.is_some() {
                        return;
                    }
                }
            }
            self.open(id);
        }
    }
}

impl Iterator for Search<'_> {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        loop {
            if let Some(solution) = self.pending.pop_front() {
                return Some(solution);
            }
            if self.stop.is_some() {
                return None;
            }
            self.step();
        }
    }
}

/// Runs a search to completion.
pub fn run(
    config: SearchConfig,
    nfa: &Nfa,
    heuristics: &HeuristicTable,
    seed: Iri,
    source: &Source,
) -> Result<(Vec<Solution>, RunSummary), ConfigError> {
    let mut search = Search::new(config, nfa, heuristics, seed, source)?;
    let solutions: Vec<Solution> = search.by_ref().collect();
    Ok((solutions, search.summary()))
}
