//! Fault and latency injection around any backend.

use std::collections::HashSet;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Backend, SourceError};
use crate::term::{Document, Iri};

/// Wraps a backend with a fixed per-request latency, optional seeded jitter
/// (which scrambles completion order under concurrency) and a set of IRIs
/// whose lookups fail.
pub struct Injected<B> {
    inner: B,
    latency: Duration,
    jitter: Option<(u64, Duration)>,
    failures: HashSet<Iri>,
}

impl<B: Backend> Injected<B> {
    pub fn new(inner: B) -> Self {
        Injected {
            inner,
            latency: Duration::ZERO,
            jitter: None,
            failures: HashSet::new(),
        }
    }

    pub fn latency(mut self, latency: Duration) -> Self {
        self.latency = latency;
        self
    }

    /// Adds a pseudo-random delay in `[0, max]` derived from `seed` and the IRI.
    pub fn jitter(mut self, seed: u64, max: Duration) -> Self {
        self.jitter = Some((seed, max));
        self
    }

    pub fn fail(mut self, iris: impl IntoIterator<Item = Iri>) -> Self {
        self.failures.extend(iris);
        self
    }

    fn delay(&self, iri: &Iri) -> Duration {
        let Some((seed, max)) = self.jitter else {
            return self.latency;
        };
        let mut hasher = DefaultHasher::new();
        iri.hash(&mut hasher);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ hasher.finish());
        let micros = rng.random_range(0..=max.as_micros() as u64);
        self.latency + Duration::from_micros(micros)
    }
}

impl<B: Backend> Backend for Injected<B> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn fetch(&self, iri: &Iri) -> Result<Document, SourceError> {
        let delay = self.delay(iri);
        if !delay.is_zero() {
            std::thread::sleep(delay);
        }
        if self.failures.contains(iri) {
            return Err(SourceError::Injected);
        }
        self.inner.fetch(iri)
    }
}
