//! k-way batch expansion.
//!
//! A batch is expanded by up to k worker threads and only merged once every
//! worker is done, strictly in extraction order, so completion timing never
//! reaches the frontier. Nodes sharing a term go to the same worker in batch
//! order; that keeps the cache-hit versus request split deterministic too.

use std::time::Duration;

use crate::nfa::Nfa;
use crate::search::{neighbours, Expansion, ProductNode};
use crate::source::{RequestLog, Session};

pub(crate) fn expand_all(nodes: &[ProductNode], nfa: &Nfa, session: &Session, batch: u64) -> Vec<Expansion> {
    if nodes.len() <= 1 {
        return nodes.iter().map(|n| neighbours(n, nfa, session, batch)).collect();
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        match groups.iter_mut().find(|g| nodes[g[0]].term == node.term) {
            Some(group) => group.push(i),
            None => groups.push(vec![i]),
        }
    }
    let mut results: Vec<Option<Expansion>> = vec![None; nodes.len()];
    std::thread::scope(|scope| {
        let workers: Vec<_> = groups
            .iter()
            .map(|group| {
                scope.spawn(move || {
                    group
                        .iter()
                        .map(|&i| (i, neighbours(&nodes[i], nfa, session, batch)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for worker in workers {
            for (i, expansion) in worker.join().expect("expansion worker panicked") {
                results[i] = Some(expansion);
            }
        }
    });
    results
        .into_iter()
        .map(|e| e.expect("every batch member expanded"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchTrace {
    pub id: u64,
    pub size: usize,
    /// Time from dispatch until the last worker finished.
    pub wall: Duration,
    /// Most requests of this batch that were running at the same instant.
    pub max_in_flight: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConcurrencyTrace {
    pub batches: Vec<BatchTrace>,
}

impl ConcurrencyTrace {
    /// Fills in `max_in_flight` for each batch from the request intervals in
    /// `log`. Cache hits do not count.
    pub fn new(batches: &[BatchTrace], log: &RequestLog) -> Self {
        let batches = batches
            .iter()
            .map(|b| {
                let mut edges: Vec<(Duration, i32)> = log
                    .records()
                    .iter()
                    .filter(|r| r.batch == b.id && r.is_request())
                    .flat_map(|r| [(r.started, 1), (r.started + r.wall, -1)])
                    .collect();
                // ends sort before starts at the same instant
                edges.sort();
                let mut current = 0i32;
                let mut peak = 0i32;
                for (_, delta) in edges {
                    current += delta;
                    peak = peak.max(current);
                }
                BatchTrace {
                    max_in_flight: peak as usize,
                    ..*b
                }
            })
            .collect();
        ConcurrencyTrace { batches }
    }

    pub fn max_in_flight(&self) -> usize {
        self.batches.iter().map(|b| b.max_in_flight).max().unwrap_or(0)
    }

    pub fn max_batch_size(&self) -> usize {
        self.batches.iter().map(|b| b.size).max().unwrap_or(0)
    }
}
