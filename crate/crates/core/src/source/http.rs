//! Live dereferencing over HTTP with content negotiation.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use parking_lot::Mutex;

use super::{Backend, SourceError};
use crate::syntax::BlankNodes;
use crate::term::{Document, Iri};
use crate::{ntriples, turtle};

pub const ACCEPT: &str = "application/n-triples, text/turtle;q=0.9";
pub const MAX_REDIRECTS: u32 = 5;

pub struct HttpBackend {
    agent: ureq::Agent,
    per_host_delay: Option<Duration>,
    last_request: Mutex<HashMap<String, Instant>>,
}

impl Default for HttpBackend {
    fn default() -> Self {
        Self::new(Duration::from_secs(30))
    }
}

impl HttpBackend {
    pub fn new(timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .max_redirects(MAX_REDIRECTS)
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpBackend {
            agent,
            per_host_delay: None,
            last_request: Mutex::new(HashMap::new()),
        }
    }

    /// Minimum spacing between two requests to the same host.
    pub fn with_per_host_delay(mut self, delay: Duration) -> Self {
        self.per_host_delay = Some(delay);
        self
    }

    fn wait_for_host(&self, url: &str) {
        let Some(delay) = self.per_host_delay else {
            return;
        };
        let host = url::Url::parse(url)
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
            .unwrap_or_default();
        let wait = {
            let mut last = self.last_request.lock();
            let now = Instant::now();
            let next = last.get(&host).map_or(now, |t| (*t + delay).max(now));
            last.insert(host, next);
            next - now
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

impl Backend for HttpBackend {
    fn name(&self) -> &str {
        "http"
    }

    fn fetch(&self, iri: &Iri) -> Result<Document, SourceError> {
        let url = iri.as_str().split('#').next().unwrap_or_default();
        self.wait_for_host(url);
        let response = self
            .agent
            .get(url)
            .header("Accept", ACCEPT)
            .call()
            .map_err(transport_error)?;
        let status = response.status().as_u16();
        if status >= 400 {
            return Err(SourceError::Status(status));
        }
        let media_type = response
            .headers()
            .get("content-type")
            .and_then(|v| v.to_str().ok())
            .unwrap_or("")
            .split(';')
            .next()
            .unwrap_or("")
            .trim()
            .to_ascii_lowercase();
        let body = response.into_body().read_to_string().map_err(transport_error)?;
        parse_body(&media_type, &body, url)
    }
}

/// Parses a response body by media type; blank-node triples are dropped.
pub fn parse_body(media_type: &str, body: &str, base: &str) -> Result<Document, SourceError> {
    match media_type {
        "application/n-triples" | "text/plain" => Ok(ntriples::parse_with(body, BlankNodes::Skip)?),
        "text/turtle" | "application/x-turtle" => Ok(turtle::parse_with(body, Some(base), BlankNodes::Skip)?),
        other => Err(SourceError::UnsupportedMediaType(other.to_string())),
    }
}

pub(crate) fn transport_error(e: ureq::Error) -> SourceError {
    match e {
        ureq::Error::Timeout(_) => SourceError::Timeout,
        ureq::Error::TooManyRedirects => SourceError::TooManyRedirects,
        ureq::Error::StatusCode(code) => SourceError::Status(code),
        other => SourceError::Transport(other.to_string()),
    }
}
