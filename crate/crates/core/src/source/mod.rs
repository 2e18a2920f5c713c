//! Dereferencing: mapping an IRI to the document it resolves to.
//!
//! A [`Backend`] answers single lookups. A [`Source`] bundles a backend with an
//! optional SPARQL [`Endpoint`]; each search run opens a fresh [`Session`] from
//! it, which owns the per-run document cache and the request log.

pub mod endpoint;
pub mod fixture;
pub mod http;
pub mod inject;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use parking_lot::Mutex;
use thiserror::Error;

use crate::syntax::SyntaxError;
use crate::term::{Document, Iri, Term, Triple};

pub use endpoint::{Direction, Endpoint, GraphEndpoint, Pattern, SparqlEndpoint};
pub use fixture::WebFixture;
pub use http::HttpBackend;
pub use inject::Injected;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP status {0}")]
    Status(u16),
    #[error("timed out")]
    Timeout,
    #[error("too many redirects")]
    TooManyRedirects,
    #[error("unsupported media type '{0}'")]
    UnsupportedMediaType(String),
    #[error("parse error: {0}")]
    Parse(#[from] SyntaxError),
    #[error("endpoint error: {0}")]
    Endpoint(String),
    #[error("injected failure")]
    Injected,
}

/// Resolves one IRI to its document. Unknown IRIs resolve to the empty
/// document; errors are for transport-level failures.
pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn fetch(&self, iri: &Iri) -> Result<Document, SourceError>;
}

impl<B: Backend + ?Sized> Backend for Arc<B> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn fetch(&self, iri: &Iri) -> Result<Document, SourceError> {
        (**self).fetch(iri)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RequestKind {
    Dereference,
    Endpoint(Pattern),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Error(String),
    CacheHit,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Ok => "ok",
            Outcome::Error(_) => "error",
            Outcome::CacheHit => "cache-hit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestRecord {
    /// Completion order within the session, strictly increasing.
    pub seq: u64,
    pub iri: Iri,
    pub backend: String,
    pub kind: RequestKind,
    pub outcome: Outcome,
    pub triples: usize,
    /// Offset from session start at which the request began.
    pub started: Duration,
    pub wall: Duration,
    pub batch: u64,
}

impl RequestRecord {
    /// Network requests, i.e. everything except cache hits.
    pub fn is_request(&self) -> bool {
        self.outcome != Outcome::CacheHit
    }
}

/// Completion-ordered request records of one session.
#[derive(Debug, Clone, Default)]
pub struct RequestLog {
    records: Vec<RequestRecord>,
}

impl RequestLog {
    pub fn records(&self) -> &[RequestRecord] {
        &self.records
    }

    pub fn request_count(&self) -> usize {
        self.records.iter().filter(|r| r.is_request()).count()
    }

    pub fn cache_hits(&self) -> usize {
        self.records.iter().filter(|r| !r.is_request()).count()
    }

    pub fn errors(&self) -> usize {
        self.records
            .iter()
            .filter(|r| matches!(r.outcome, Outcome::Error(_)))
            .count()
    }

    /// Records stably sorted by batch id, then IRI, for reporting.
    pub fn sorted_for_report(&self) -> Vec<RequestRecord> {
        let mut out = self.records.clone();
        out.sort_by(|a, b| a.batch.cmp(&b.batch).then_with(|| a.iri.cmp(&b.iri)));
        out
    }
}

/// A backend plus an optional endpoint used to augment every dereference.
#[derive(Clone)]
pub struct Source {
    backend: Arc<dyn Backend>,
    endpoint: Option<Arc<dyn Endpoint>>,
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Source")
            .field("backend", &self.backend.name())
            .field("endpoint", &self.endpoint.as_ref().map(|e| e.name().to_string()))
            .finish()
    }
}

impl Source {
    pub fn new(backend: impl Backend + 'static) -> Self {
        Source {
            backend: Arc::new(backend),
            endpoint: None,
        }
    }

    pub fn from_arc(backend: Arc<dyn Backend>) -> Self {
        Source {
            backend,
            endpoint: None,
        }
    }

    pub fn with_endpoint(mut self, endpoint: impl Endpoint + 'static) -> Self {
        self.endpoint = Some(Arc::new(endpoint));
        self
    }

    pub fn has_endpoint(&self) -> bool {
        self.endpoint.is_some()
    }

    /// Opens a session with an empty cache and log.
    pub fn session(&self) -> Session {
        Session {
            backend: self.backend.clone(),
            endpoint: self.endpoint.clone(),
            docs: Mutex::new(HashMap::new()),
            selections: Mutex::new(HashMap::new()),
            log: Mutex::new(Vec::new()),
            epoch: Instant::now(),
            in_flight: AtomicUsize::new(0),
        }
    }
}

type Slot<T> = Arc<OnceLock<Arc<T>>>;

type SelectionKey = (Iri, Pattern);

/// Per-run dereferencing state: document cache keyed by IRI, endpoint answer
/// cache keyed by (IRI, pattern), and the request log. Safe to share between
/// expansion workers; concurrent lookups of one key wait for a single fetch.
pub struct Session {
    backend: Arc<dyn Backend>,
    endpoint: Option<Arc<dyn Endpoint>>,
    docs: Mutex<HashMap<Iri, Slot<Document>>>,
    selections: Mutex<HashMap<SelectionKey, Slot<Vec<Triple>>>>,
    log: Mutex<Vec<RequestRecord>>,
    epoch: Instant,
    in_flight: AtomicUsize,
}

/// The result of one dereference, with the records it produced.
#[derive(Debug, Clone)]
pub struct Fetch {
    pub document: Arc<Document>,
    pub records: Vec<RequestRecord>,
}

impl Session {
    pub fn has_endpoint(&self) -> bool {
        self.endpoint.is_some()
    }

    pub fn epoch(&self) -> Instant {
        self.epoch
    }

    /// Dereferences a term. Literals yield the empty document without any
    /// request. With an endpoint configured, the document is augmented with
    /// one endpoint selection per pattern.
    pub fn dereference(&self, term: &Term, patterns: &[Pattern], batch: u64) -> Fetch {
        let Term::Iri(iri) = term else {
            return Fetch {
                document: Arc::new(Document::new()),
                records: Vec::new(),
            };
        };
        let mut records = Vec::new();
        let document = self.cached_document(iri, batch, &mut records);
        let Some(endpoint) = self.endpoint.as_ref().filter(|_| !patterns.is_empty()) else {
            return Fetch { document, records };
        };
        let mut augmented = (*document).clone();
        for pattern in patterns {
            let triples = self.cached_selection(endpoint.as_ref(), iri, pattern, batch, &mut records);
            augmented.extend(triples.iter().cloned());
        }
        Fetch {
            document: Arc::new(augmented),
            records,
        }
    }

    fn cached_document(&self, iri: &Iri, batch: u64, records: &mut Vec<RequestRecord>) -> Arc<Document> {
        let slot = self.docs.lock().entry(iri.clone()).or_default().clone();
        let mut fresh = false;
        let doc = slot
            .get_or_init(|| {
                fresh = true;
                let started = self.epoch.elapsed();
                let t0 = Instant::now();
                let result = self.tracked(|| self.backend.fetch(iri));
                let (doc, outcome) = match result {
                    Ok(doc) => (doc, Outcome::Ok),
                    Err(e) => (Document::new(), Outcome::Error(e.to_string())),
                };
                records.push(self.record(
                    iri,
                    RequestKind::Dereference,
                    outcome,
                    doc.len(),
                    started,
                    t0.elapsed(),
                    batch,
                ));
                Arc::new(doc)
            })
            .clone();
        if !fresh {
            let started = self.epoch.elapsed();
            records.push(self.record(
                iri,
                RequestKind::Dereference,
                Outcome::CacheHit,
                doc.len(),
                started,
                Duration::ZERO,
                batch,
            ));
        }
        doc
    }

    fn cached_selection(
        &self,
        endpoint: &dyn Endpoint,
        iri: &Iri,
        pattern: &Pattern,
        batch: u64,
        records: &mut Vec<RequestRecord>,
    ) -> Arc<Vec<Triple>> {
        let key = (iri.clone(), pattern.clone());
        let slot = self.selections.lock().entry(key).or_default().clone();
        let mut fresh = false;
        let triples = slot
            .get_or_init(|| {
                fresh = true;
                let started = self.epoch.elapsed();
                let t0 = Instant::now();
                let result = self.tracked(|| endpoint.select(iri, pattern));
                let (triples, outcome) = match result {
                    Ok(found) => (
                        found.into_iter().map(|x| pattern.triple(iri, x)).collect::<Vec<_>>(),
                        Outcome::Ok,
                    ),
                    Err(e) => (Vec::new(), Outcome::Error(e.to_string())),
                };
                let kind = RequestKind::Endpoint(pattern.clone());
                records.push(self.record(iri, kind, outcome, triples.len(), started, t0.elapsed(), batch));
                Arc::new(triples)
            })
            .clone();
        if !fresh {
            let started = self.epoch.elapsed();
            let kind = RequestKind::Endpoint(pattern.clone());
            records.push(self.record(
                iri,
                kind,
                Outcome::CacheHit,
                triples.len(),
                started,
                Duration::ZERO,
                batch,
            ));
        }
        triples
    }

    fn tracked<T>(&self, f: impl FnOnce() -> T) -> T {
        self.in_flight.fetch_add(1, Ordering::SeqCst);
        let out = f();
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &self,
        iri: &Iri,
        kind: RequestKind,
        outcome: Outcome,
        triples: usize,
        started: Duration,
        wall: Duration,
        batch: u64,
    ) -> RequestRecord {
        let backend = match &kind {
            RequestKind::Dereference => self.backend.name().to_string(),
            RequestKind::Endpoint(_) => self.endpoint.as_ref().map_or("endpoint", |e| e.name()).to_string(),
        };
        let mut log = self.log.lock();
        let record = RequestRecord {
            seq: log.len() as u64,
            iri: iri.clone(),
            backend,
            kind,
            outcome,
            triples,
            started,
            wall,
            batch,
        };
        log.push(record.clone());
        record
    }

    /// Snapshot of the request log in completion order.
    pub fn log(&self) -> RequestLog {
        RequestLog {
            records: self.log.lock().clone(),
        }
    }
}
