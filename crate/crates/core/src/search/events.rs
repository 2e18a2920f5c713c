use std::time::Duration;

use crate::nfa::StateId;
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Request,
    CacheHit,
    RequestError,
    Expansion,
    Emission,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Request => "request",
            EventKind::CacheHit => "cache_hit",
            EventKind::RequestError => "request_error",
            EventKind::Expansion => "expansion",
            EventKind::Emission => "emission",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub seq: u64,
    pub kind: EventKind,
    pub term: Term,
    /// Automaton state for expansions and emissions.
    pub state: Option<StateId>,
    /// Path cost for emissions, g for expansions.
    pub cost: Option<u32>,
    pub requests_so_far: usize,
    pub answers_so_far: usize,
    pub elapsed: Duration,
    pub batch: u64,
}

impl Event {
    /// IRIs without angle brackets, literals in N-Triples form.
    pub fn subject(&self) -> String {
        match &self.term {
            Term::Iri(iri) => iri.as_str().to_string(),
            other => other.to_string(),
        }
    }
}

pub const CSV_HEADER: [&str; 6] = ["seq", "kind", "iri_or_answer", "cost", "requests_so_far", "elapsed_ms"];

/// Everything a run did, in the order the control thread processed it.
#[derive(Debug, Clone, Default)]
pub struct EventLog {
    events: Vec<Event>,
    requests: usize,
    answers: usize,
}

impl EventLog {
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn requests(&self) -> usize {
        self.requests
    }

    pub fn answers(&self) -> usize {
        self.answers
    }

    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &Event> + '_ {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub(crate) fn push(
        &mut self,
        kind: EventKind,
        term: Term,
        state: Option<StateId>,
        cost: Option<u32>,
        elapsed: Duration,
        batch: u64,
    ) {
        match kind {
            EventKind::Request | EventKind::RequestError => self.requests += 1,
            EventKind::Emission => self.answers += 1,
            _ => {}
        }
        self.events.push(Event {
            seq: self.events.len() as u64,
            kind,
            term,
            state,
            cost,
            requests_so_far: self.requests,
            answers_so_far: self.answers,
            elapsed,
            batch,
        });
    }

    /// CSV with header. Without timestamps the `elapsed_ms` column is left
    /// empty, which makes logs of identical runs byte-comparable.
    pub fn to_csv(&self, timestamps: bool) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for e in &self.events {
            let elapsed = if timestamps {
                format!("{:.3}", e.elapsed.as_secs_f64() * 1000.0)
            } else {
                String::new()
            };
            writer
                .write_record([
                    e.seq.to_string(),
                    e.kind.as_str().to_string(),
                    e.subject(),
                    e.cost.map(|c| c.to_string()).unwrap_or_default(),
                    e.requests_so_far.to_string(),
                    elapsed,
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}
