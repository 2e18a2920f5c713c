//! Dereferencing and endpoint queries against a throwaway local HTTP server.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use ldpath::source::endpoint::Endpoint;
use ldpath::source::{Backend, HttpBackend, Outcome, Pattern, SourceError, SparqlEndpoint};
use ldpath::{Iri, Query, SearchConfig, Source, Term, Triple};

type Handler = dyn Fn(&str) -> (u16, Vec<(String, String)>, String) + Send + Sync;

struct Server {
    base: String,
    headers: Arc<Mutex<Vec<HashMap<String, String>>>>,
}

impl Server {
    fn start(handler: Box<Handler>) -> Server {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let headers = Arc::new(Mutex::new(Vec::new()));
        let seen = headers.clone();
        let handler: Arc<Handler> = Arc::from(handler);
        std::thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let seen = seen.clone();
                let handler = handler.clone();
                std::thread::spawn(move || serve(stream, &*handler, &seen));
            }
        });
        Server { base, headers }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }
}

fn serve(stream: TcpStream, handler: &Handler, seen: &Mutex<Vec<HashMap<String, String>>>) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).is_err() {
        return;
    }
    let target = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut headers = HashMap::new();
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
            break;
        }
        if let Some((k, v)) = line.trim_end().split_once(':') {
            headers.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
    }
    seen.lock().unwrap().push(headers);
    let (status, extra, body) = handler(&target);
    let mut out = stream;
    let mut response = format!(
        "HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n",
        body.len()
    );
    for (k, v) in extra {
        response.push_str(&format!("{k}: {v}\r\n"));
    }
    response.push_str("\r\n");
    response.push_str(&body);
    let _ = out.write_all(response.as_bytes());
}

fn header(name: &str, value: &str) -> Vec<(String, String)> {
    vec![(name.to_string(), value.to_string())]
}

fn web_server() -> Server {
    Server::start(Box::new(|target: &str| {
        let nt = "<http://example.org/a> <http://example.org/p> <http://example.org/b> .\n";
        if let Some(n) = target.strip_prefix("/hop") {
            let n: u32 = n.parse().unwrap();
            return if n == 0 {
                (200, header("Content-Type", "application/n-triples"), nt.to_string())
            } else {
                (302, header("Location", &format!("/hop{}", n - 1)), String::new())
            };
        }
        match target {
            "/nt" => (
                200,
                header("Content-Type", "application/n-triples; charset=utf-8"),
                nt.to_string(),
            ),
            "/ttl" => (
                200,
                header("Content-Type", "text/turtle"),
                "@prefix ex: <http://example.org/> .\n<a> ex:p ex:b, ex:c ; ex:q \"x\"@en .\n_:b ex:p ex:b .\n"
                    .to_string(),
            ),
            "/html" => (200, header("Content-Type", "text/html"), "<html></html>".to_string()),
            "/broken" => (
                200,
                header("Content-Type", "application/n-triples"),
                "<a> <b>".to_string(),
            ),
            _ => (404, Vec::new(), "not found".to_string()),
        }
    }))
}

#[test]
fn fetches_ntriples_with_content_negotiation() {
    let server = web_server();
    let doc = HttpBackend::default().fetch(&Iri::new(server.url("/nt#frag"))).unwrap();
    assert_eq!(doc.len(), 1);
    let headers = server.headers.lock().unwrap();
    assert_eq!(headers[0]["accept"], "application/n-triples, text/turtle;q=0.9");
}

#[test]
fn fetches_turtle_resolving_relative_iris() {
    let server = web_server();
    let doc = HttpBackend::default().fetch(&Iri::new(server.url("/ttl"))).unwrap();
    // the blank-node triple is dropped
    assert_eq!(doc.len(), 3);
    let subject = Term::iri(server.url("/a"));
    assert!(doc.contains(&Triple::new(
        subject,
        "http://example.org/p",
        Term::iri("http://example.org/b")
    )));
}

#[test]
fn error_statuses_and_media_types() {
    let server = web_server();
    let http = HttpBackend::default();
    assert_eq!(
        http.fetch(&Iri::new(server.url("/missing"))),
        Err(SourceError::Status(404))
    );
    assert!(matches!(
        http.fetch(&Iri::new(server.url("/html"))),
        Err(SourceError::UnsupportedMediaType(_))
    ));
    assert!(matches!(
        http.fetch(&Iri::new(server.url("/broken"))),
        Err(SourceError::Parse(_))
    ));
}

#[test]
fn redirects_are_capped_at_five() {
    let server = web_server();
    let http = HttpBackend::default();
    assert_eq!(http.fetch(&Iri::new(server.url("/hop5"))).unwrap().len(), 1);
    assert_eq!(
        http.fetch(&Iri::new(server.url("/hop6"))),
        Err(SourceError::TooManyRedirects)
    );
}

#[test]
fn failures_become_error_records() {
    let server = web_server();
    let session = Source::new(HttpBackend::default()).session();
    let fetch = session.dereference(&Term::iri(server.url("/hop6")), &[], 0);
    assert!(fetch.document.is_empty());
    assert!(matches!(fetch.records[0].outcome, Outcome::Error(_)));
    let fetch = session.dereference(&Term::iri(server.url("/missing")), &[], 0);
    assert!(fetch.document.is_empty());
    assert_eq!(session.log().errors(), 2);
}

#[test]
fn unreachable_hosts_time_out_or_fail() {
    let http = HttpBackend::new(Duration::from_millis(300));
    // port 9 on localhost is almost never open
    assert!(http.fetch(&Iri::new("http://127.0.0.1:9/x")).is_err());
}

fn mini_dblp_server() -> Server {
    Server::start(Box::new(|target: &str| {
        let Some(query) = target.split_once("?query=").map(|(_, q)| q) else {
            return (404, Vec::new(), String::new());
        };
        let query = url::form_urlencoded::parse(format!("q={query}").as_bytes())
            .next()
            .map(|(_, v)| v.into_owned())
            .unwrap_or_default();
        let creator = "<http://purl.org/dc/elements/1.1/creator>";
        let alice = "<http://example.org/dblp/alice>";
        let body = if query == format!("SELECT ?x WHERE {{ ?x {creator} {alice} }}") {
            r#"{"head":{"vars":["x"]},"results":{"bindings":[{"x":{"type":"uri","value":"http://example.org/dblp/p1"}}]}}"#
        } else {
            r#"{"head":{"vars":["x"]},"results":{"bindings":[]}}"#
        };
        (
            200,
            header("Content-Type", "application/sparql-results+json"),
            body.to_string(),
        )
    }))
}

#[test]
fn sparql_endpoint_selects_one_direction() {
    let server = mini_dblp_server();
    let endpoint = SparqlEndpoint::new(server.url("/sparql"));
    let alice = Iri::new("http://example.org/dblp/alice");
    let creator = "http://purl.org/dc/elements/1.1/creator";
    assert_eq!(
        endpoint.select(&alice, &Pattern::backward(creator)).unwrap(),
        vec![Term::iri("http://example.org/dblp/p1")]
    );
    assert!(endpoint.select(&alice, &Pattern::forward(creator)).unwrap().is_empty());
    assert_eq!(
        server.headers.lock().unwrap()[0]["accept"],
        "application/sparql-results+json"
    );
}

#[test]
fn endpoint_augmentation_logs_one_request_per_pattern() {
    let server = mini_dblp_server();
    let source = Source::new(ldpath::WebFixture::new()).with_endpoint(SparqlEndpoint::new(server.url("/sparql")));
    let session = source.session();
    let creator = "http://purl.org/dc/elements/1.1/creator";
    let alice = Term::iri("http://example.org/dblp/alice");
    let fetch = session.dereference(&alice, &[Pattern::backward(creator)], 0);
    let expected = Triple::new(Term::iri("http://example.org/dblp/p1"), creator, alice.clone());
    assert_eq!(fetch.document.iter().cloned().collect::<Vec<_>>(), vec![expected]);
    let two = [Pattern::backward(creator), Pattern::forward(creator)];
    let fetch = session.dereference(&Term::iri("http://example.org/dblp/bob"), &two, 0);
    let endpoint_requests = fetch
        .records
        .iter()
        .filter(|r| matches!(r.kind, ldpath::source::RequestKind::Endpoint(_)))
        .count();
    assert_eq!(endpoint_requests, 2);
    let plain = session.dereference(&Term::iri("http://example.org/dblp/carol"), &[], 0);
    assert_eq!(plain.records.len(), 1);
}

#[test]
fn search_over_http() {
    // documents served under the server's own address
    let docs: Arc<Mutex<HashMap<String, String>>> = Arc::default();
    let served = docs.clone();
    let server = Server::start(Box::new(move |target: &str| match served.lock().unwrap().get(target) {
        Some(body) => (200, header("Content-Type", "application/n-triples"), body.clone()),
        None => (404, Vec::new(), String::new()),
    }));
    let iri = |local: &str| format!("<{}>", server.url(&format!("/{local}")));
    let wrote = |p: &str, a: &str| format!("{} <http://purl.org/dc/elements/1.1/creator> {} .\n", iri(p), iri(a));
    {
        let mut d = docs.lock().unwrap();
        d.insert("/alice".into(), wrote("p1", "alice"));
        d.insert("/bob".into(), wrote("p1", "bob") + &wrote("p2", "bob"));
        d.insert("/p1".into(), wrote("p1", "alice") + &wrote("p1", "bob"));
        d.insert("/p2".into(), wrote("p2", "bob") + &wrote("p2", "carol"));
    }
    let query = Query::parse("(^dc:creator/dc:creator)*", &ldpath::PrefixTable::common()).unwrap();
    let source = Source::new(HttpBackend::default());
    let mut search = query
        .search(
            SearchConfig::astar().parallelism(2),
            Iri::new(server.url("/alice")),
            &source,
        )
        .unwrap();
    let got: Vec<(String, u32)> = search
        .by_ref()
        .map(|s| (s.answer.as_iri().unwrap().as_str().to_string(), s.cost))
        .collect();
    assert_eq!(
        got,
        vec![
            (server.url("/alice"), 0),
            (server.url("/bob"), 2),
            (server.url("/carol"), 4)
        ]
    );
    // carol has no document: a 404 is logged and the search carries on
    assert_eq!(search.finish().requests.errors(), 1);
}
