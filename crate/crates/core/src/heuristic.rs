//! Automaton-distance heuristics for A*.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Add;

use crate::nfa::{Nfa, StateId};

/// A non-negative edge count or infinity. `Finite(_) < Infinite`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Infinite,
}

impl Distance {
    pub const ZERO: Distance = Distance::Finite(0);

    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Distance::Infinite
    }
}

impl Add<u32> for Distance {
    type Output = Distance;

    fn add(self, rhs: u32) -> Distance {
        match self {
            Distance::Finite(d) => Distance::Finite(d + rhs),
            Distance::Infinite => Distance::Infinite,
        }
    }
}

impl fmt::Debug for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Which per-state estimate A* orders its frontier by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeuristicKind {
    #[default]
    Plain,
    Pathmax,
}

/// Per-state estimates: `distance` is the edge distance to the nearest final
/// state; `pathmax` equals it except on final states, where it is one plus the
/// smallest distance among successors (infinite for final sinks).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicTable {
    distance: Vec<Distance>,
    pathmax: Vec<Distance>,
}

impl HeuristicTable {
    pub fn new(nfa: &Nfa) -> Self {
        let distance = distance_heuristic(nfa);
        let pathmax = pathmax_heuristic(nfa, &distance);
        HeuristicTable { distance, pathmax }
    }

    pub fn distance(&self, state: StateId) -> Distance {
        self.distance[state]
    }

    pub fn pathmax(&self, state: StateId) -> Distance {
        self.pathmax[state]
    }

    pub fn get(&self, kind: HeuristicKind, state: StateId) -> Distance {
        match kind {
            HeuristicKind::Plain => self.distance[state],
            HeuristicKind::Pathmax => self.pathmax[state],
        }
    }

    pub fn distances(&self) -> &[Distance] {
        &self.distance
    }

    pub fn pathmax_values(&self) -> &[Distance] {
        &self.pathmax
    }
}

/// Reverse breadth-first search from the final states over the transition
/// graph, ignoring labels.
pub fn distance_heuristic(nfa: &Nfa) -> Vec<Distance> {
    let n = nfa.num_states();
    let mut predecessors = vec![Vec::new(); n];
    for t in nfa.transitions() {
        predecessors[t.to].push(t.from);
    }
    let mut dist = vec![Distance::Infinite; n];
    let mut queue = VecDeque::new();
    for &f in nfa.finals() {
        dist[f] = Distance::ZERO;
        queue.push_back(f);
    }
    while let Some(q) = queue.pop_front() {
        let next = dist[q] + 1;
        for &p in &predecessors[q] {
            if dist[p].is_infinite() {
                dist[p] = next;
                queue.push_back(p);
            }
        }
    }
    dist
}

pub fn pathmax_heuristic(nfa: &Nfa, distance: &[Distance]) -> Vec<Distance> {
    (0..nfa.num_states())
        .map(|q| {
            if !nfa.is_final(q) {
                return distance[q];
            }
            nfa.outgoing(q)
                .iter()
                .map(|&(_, to)| distance[to])
                .min()
                .map_or(Distance::Infinite, |d| d + 1)
        })
        .collect()
}
