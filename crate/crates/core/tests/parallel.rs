use std::collections::BTreeSet;
use std::time::Duration;

use ldpath::random::instance;
use ldpath::search::{self, EventKind};
use ldpath::source::fixture::mini_dblp;
use ldpath::source::Injected;
use ldpath::{compile, Document, HeuristicTable, Iri, Query, SearchConfig, Source, Term, Triple, WebFixture};

const CREATOR: &str = "http://purl.org/dc/elements/1.1/creator";

fn answer_costs(solutions: &[ldpath::Solution]) -> BTreeSet<(Term, u32)> {
    solutions.iter().map(|s| (s.answer.clone(), s.cost)).collect()
}

#[test]
fn mini_dblp_bfs_matches_across_k() {
    let web = mini_dblp();
    let query = Query::parse("(^dc:creator/dc:creator)*", &web.prefixes).unwrap();
    let source = Source::new(web.clone());
    let run = |k| {
        search::run(
            SearchConfig::bfs().parallelism(k),
            &query.nfa,
            &query.heuristics,
            web.iri("alice"),
            &source,
        )
        .unwrap()
    };
    let (sequential, _) = run(1);
    let (parallel, summary) = run(4);
    assert_eq!(answer_costs(&sequential), answer_costs(&parallel));
    assert!(summary.trace.max_batch_size() <= 4);
}

#[test]
fn k1_batches_have_size_one() {
    let web = mini_dblp();
    let query = Query::parse("(^dc:creator/dc:creator)*", &web.prefixes).unwrap();
    let summary = query
        .search(SearchConfig::astar(), web.iri("alice"), &Source::new(web.clone()))
        .unwrap()
        .finish();
    assert!(summary.trace.batches.iter().all(|b| b.size == 1));
    assert_eq!(summary.trace.batches.len(), summary.stats.batches);
}

/// Completion order is scrambled by per-IRI jitter; the merged log must not
/// notice.
#[test]
fn logs_do_not_depend_on_completion_order() {
    for seed in 0..30 {
        let inst = instance(seed);
        let nfa = compile(&inst.expr);
        let table = HeuristicTable::new(&nfa);
        let web = WebFixture::complete(&inst.graph);
        for config in [SearchConfig::bfs(), SearchConfig::dfs(), SearchConfig::astar()] {
            for k in [2, 4] {
                let config = config.parallelism(k);
                let logs: Vec<String> = (0..2u64)
                    .map(|jitter| {
                        let source = Source::new(Injected::new(web.clone()).jitter(jitter, Duration::from_millis(3)));
                        let (_, summary) = search::run(config, &nfa, &table, inst.seed.clone(), &source).unwrap();
                        summary.events.to_csv(false)
                    })
                    .collect();
                assert_eq!(logs[0], logs[1], "seed {seed} {config:?}");
            }
        }
    }
}

fn hub_fixture(papers: usize) -> (WebFixture, Iri) {
    let hub = Iri::new("http://example.org/hub");
    let mut web = WebFixture::new();
    let mut hub_doc = Document::new();
    for i in 0..papers {
        let paper = Term::iri(format!("http://example.org/paper{i}"));
        let t = Triple::new(paper.clone(), CREATOR, hub.clone());
        hub_doc.insert(t.clone());
        web.insert(paper.as_iri().unwrap().clone(), [t].into_iter().collect());
    }
    web.insert(hub.clone(), hub_doc);
    (web, hub)
}

#[test]
fn in_flight_requests_never_exceed_k() {
    let (web, hub) = hub_fixture(100);
    let query = Query::parse(&format!("^<{CREATOR}>/<{CREATOR}>"), &ldpath::PrefixTable::new()).unwrap();
    let source = Source::new(Injected::new(web).latency(Duration::from_millis(5)));
    let summary = query
        .search(SearchConfig::bfs().parallelism(20), hub, &source)
        .unwrap()
        .finish();
    assert_eq!(summary.events.of_kind(EventKind::Emission).count(), 1);
    assert!(summary.trace.max_in_flight() <= 20);
    assert!(summary.trace.max_in_flight() > 1);
    assert_eq!(summary.trace.max_batch_size(), 20);
}
