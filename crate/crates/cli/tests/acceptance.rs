//! End-to-end acceptance checks. Each criterion runs in isolation and prints
//! one PASS or FAIL line; the binary exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ldpath::oracle::{eval_product, eval_semantics, k_shortest_goal_costs};
use ldpath::random::{self, instance, Instance};
use ldpath::search::{self, EventKind, EventLog};
use ldpath::source::fixture::mini_dblp;
use ldpath::source::{Injected, RequestKind};
use ldpath::{
    compile, Algorithm, Document, Emission, HeuristicKind, HeuristicTable, Iri, Nfa, PathExpr, Query, SearchConfig,
    Solution, Source, StateId, Term, WebFixture,
};
use ldpath_cli::app;
use ldpath_cli::blocks::{parse_blocks, render_blocks, PathBlock};
use ldpath_cli::genfixture::{self, star};
use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const COAUTHORS: &str = "(^dc:creator/dc:creator)*";
const INSTANCES: u64 = 500;

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("heuristic table of the co-author paper automaton", heuristic_table),
        ("answer sets match both oracles", oracle_equivalence),
        ("k-th emission costs the k-th shortest goal cost", optimality),
        ("A* expands no more than BFS", dominance),
        ("parallel batches change nothing observable", parallel_equivalence),
        ("latency overlaps under parallel expansion", latency_overlap),
        ("one request per distinct IRI", request_accounting),
        ("witness paths replay and round-trip", path_validity),
        ("star queries emit the seed first", star_seed_first),
        ("transport errors behave like empty documents", robustness),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({detail}; {secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Case {
    name: String,
    expr: PathExpr,
    nfa: Nfa,
    table: HeuristicTable,
    graph: Document,
    web: WebFixture,
    seed: Iri,
}

impl Case {
    fn from_instance(id: u64, inst: Instance) -> Case {
        let nfa = compile(&inst.expr);
        Case {
            name: format!("instance {id} {:?}", inst.expr),
            table: HeuristicTable::new(&nfa),
            nfa,
            expr: inst.expr,
            web: WebFixture::complete(&inst.graph),
            graph: inst.graph,
            seed: inst.seed,
        }
    }

    fn from_fixture(name: &str, web: WebFixture, query: &str, seed: Iri) -> Case {
        let Query { expr, nfa, heuristics } = Query::parse(query, &web.prefixes).expect("query parses");
        Case {
            name: name.to_string(),
            expr,
            table: heuristics,
            nfa,
            graph: web.union_graph(),
            web,
            seed,
        }
    }

    fn start(&self) -> Term {
        Term::Iri(self.seed.clone())
    }

    fn run(&self, config: SearchConfig, source: &Source) -> (Vec<Solution>, search::RunSummary) {
        search::run(config, &self.nfa, &self.table, self.seed.clone(), source).expect("valid config")
    }

    fn run_fixture(&self, config: SearchConfig) -> (Vec<Solution>, search::RunSummary) {
        self.run(config, &Source::new(self.web.clone()))
    }
}

fn instances() -> impl Iterator<Item = Case> {
    (0..INSTANCES).map(|i| Case::from_instance(i, instance(i)))
}

fn star_cases() -> impl Iterator<Item = Case> {
    (5..=50).flat_map(|n| {
        let web = star(n, n as u64);
        let hub = genfixture::iri("hub");
        [COAUTHORS, "(^dc:creator/dc:creator)*/rdfs:label"]
            .into_iter()
            .map(move |q| Case::from_fixture(&format!("star({n}) {q}"), web.clone(), q, hub.clone()))
    })
}

fn mini_case() -> Case {
    let web = mini_dblp();
    let alice = web.iri("alice");
    Case::from_fixture("mini-dblp", web, COAUTHORS, alice)
}

fn answer_set(solutions: &[Solution]) -> BTreeSet<Term> {
    solutions.iter().map(|s| s.answer.clone()).collect()
}

fn answer_costs(solutions: &[Solution]) -> BTreeSet<(Term, u32)> {
    solutions.iter().map(|s| (s.answer.clone(), s.cost)).collect()
}

fn heuristic_table() -> Result<String, String> {
    let prefixes = ldpath::PrefixTable::common();
    let build = || {
        let started = Instant::now();
        let query = Query::parse("(^dc:creator/dc:creator)*/^dc:creator", &prefixes);
        (query, started.elapsed())
    };
    // best of a few builds, so a cold cache does not count
    let elapsed = (0..5).map(|_| build().1).min().unwrap_or_default();
    let query = build().0.map_err(|e| e.to_string())?;
    let nfa = &query.nfa;
    ensure(nfa.num_states() == 3, || format!("{} states", nfa.num_states()))?;
    // q0 is initial, q2 the sink final state reached by the last ^dc:creator
    let q0 = nfa.initial();
    let q2 = *nfa.finals().iter().next().ok_or("no final state")?;
    let q1 = (0..3).find(|q| *q != q0 && *q != q2).ok_or("no middle state")?;
    let h = |q: StateId| query.heuristics.distance(q).finite();
    ensure((h(q0), h(q1), h(q2)) == (Some(1), Some(2), Some(0)), || {
        format!("h(q0,q1,q2) = {:?}", (h(q0), h(q1), h(q2)))
    })?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("h = (1, 2, 0) in {}us", elapsed.as_micros()))
}

fn oracle_configs() -> Vec<SearchConfig> {
    [1, 4]
        .into_iter()
        .flat_map(|k| Algorithm::ALL.map(|a| SearchConfig::new(a).parallelism(k)))
        .collect()
}

fn oracle_equivalence() -> Result<String, String> {
    let started = Instant::now();
    let mut runs = 0;
    for case in instances() {
        let start = case.start();
        let by_semantics: BTreeSet<Term> = eval_semantics(&case.expr, &case.graph)
            .into_iter()
            .filter(|(s, _)| *s == start)
            .map(|(_, o)| o)
            .collect();
        let by_product: BTreeSet<Term> = eval_product(&case.nfa, &case.graph, &start).into_keys().collect();
        ensure(by_semantics == by_product, || {
            format!("{}: oracles disagree", case.name)
        })?;
        for config in oracle_configs() {
            let (solutions, _) = case.run_fixture(config);
            runs += 1;
            ensure(answer_set(&solutions) == by_product, || {
                format!(
                    "{} {config:?}: got {:?}, want {by_product:?}",
                    case.name,
                    answer_set(&solutions)
                )
            })?;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{INSTANCES} instances, {runs} runs, 0 mismatches"))
}

fn optimal_configs() -> Vec<SearchConfig> {
    [1, 4]
        .into_iter()
        .flat_map(|k| {
            [
                SearchConfig::bfs(),
                SearchConfig::astar(),
                SearchConfig::astar().emission(Emission::Eager),
            ]
            .map(|c| c.parallelism(k))
        })
        .collect()
}

fn optimality() -> Result<String, String> {
    let mut checked = 0;
    for case in instances().chain([mini_case()]).chain(star_cases()) {
        let start = case.start();
        let truth = k_shortest_goal_costs(&case.nfa, &case.graph, &start);
        for config in optimal_configs() {
            let (solutions, summary) = case.run_fixture(config);
            let costs: Vec<u32> = solutions.iter().map(|s| s.cost).collect();
            let discovered = summary.discovered.k_shortest_goal_costs(&case.nfa, &start);
            ensure(costs == discovered, || {
                format!(
                    "{} {config:?}: emitted {costs:?}, discovered graph gives {discovered:?}",
                    case.name
                )
            })?;
            ensure(costs == truth, || {
                format!(
                    "{} {config:?}: emitted {costs:?}, full graph gives {truth:?}",
                    case.name
                )
            })?;
            checked += costs.len();
        }
    }
    Ok(format!("{checked} emissions checked"))
}

type Expanded = BTreeMap<(Term, StateId), u32>;

/// Nodes expanded before each emission, with the g at which they were
/// expanded, plus every expansion of the run.
fn expanded_at_emissions(log: &EventLog) -> (Vec<(u32, Expanded)>, Expanded) {
    let mut expanded = BTreeMap::new();
    let mut out = Vec::new();
    for e in log.events() {
        match e.kind {
            EventKind::Expansion => {
                expanded.insert(
                    (e.term.clone(), e.state.unwrap_or_default()),
                    e.cost.unwrap_or_default(),
                );
            }
            EventKind::Emission => out.push((e.cost.unwrap_or_default(), expanded.clone())),
            _ => {}
        }
    }
    (out, expanded)
}

/// BFS reports a cost-c answer while generating it, part way through layer
/// c-1, whereas A* first expands everything with f < c. The BFS point that
/// corresponds to A*'s cost-c emission is therefore the close of layer c-1:
/// all BFS expansions with g < c.
fn dominance() -> Result<String, String> {
    let (mut cases, mut points, mut ties) = (0, 0, 0);
    for case in instances()
        .take(200)
        .chain([mini_case()])
        .chain(star_cases().step_by(9))
    {
        let (_, bfs) = case.run_fixture(SearchConfig::bfs());
        let (_, astar) = case.run_fixture(SearchConfig::astar());
        let g_order: Vec<u32> = bfs
            .events
            .of_kind(EventKind::Expansion)
            .filter_map(|e| e.cost)
            .collect();
        ensure(g_order.windows(2).all(|w| w[0] <= w[1]), || {
            format!("{}: BFS left layer order", case.name)
        })?;
        let (_, bfs_all) = expanded_at_emissions(&bfs.events);
        let (astar, _) = expanded_at_emissions(&astar.events);
        ensure(bfs.events.answers() == astar.len(), || {
            format!("{}: emission counts differ", case.name)
        })?;
        for (m, (cost, a)) in astar.iter().enumerate() {
            points += 1;
            let layer = bfs_all.iter().filter(|(_, g)| **g < *cost).count();
            let mut exceptions = 0;
            for (node, g) in a
                .iter()
                .filter(|(node, _)| bfs_all.get(*node).is_none_or(|bg| bg >= cost))
            {
                let f = case.table.distance(node.1).finite().map(|h| g + h);
                ensure(f == Some(*cost), || {
                    format!(
                        "{}: emission {m} (cost {cost}): A* expanded {node:?} with f = {f:?}",
                        case.name
                    )
                })?;
                exceptions += 1;
            }
            ensure(a.len() <= layer + exceptions, || {
                format!(
                    "{}: emission {m}: {} A* expansions vs {layer} for BFS",
                    case.name,
                    a.len()
                )
            })?;
            ties += exceptions;
        }
        cases += 1;
    }
    Ok(format!(
        "{cases} fixtures, {points} emission points, {ties} f-tie exceptions"
    ))
}

fn parallel_equivalence() -> Result<String, String> {
    let mut runs = 0;
    let cases = instances()
        .take(150)
        .chain([mini_case()])
        .chain(star_cases().step_by(9));
    for case in cases {
        for config in [SearchConfig::dfs(), SearchConfig::bfs(), SearchConfig::astar()] {
            let (sequential, sequential_log) = case.run_fixture(config);
            let expected = answer_costs(&sequential);
            for (jitter, k) in [1, 2, 4, 10].into_iter().enumerate() {
                let source =
                    Source::new(Injected::new(case.web.clone()).jitter(jitter as u64, Duration::from_micros(300)));
                let (solutions, summary) = case.run(config.parallelism(k), &source);
                runs += 1;
                if config.algorithm != Algorithm::Dfs {
                    ensure(answer_costs(&solutions) == expected, || {
                        format!("{} {config:?} k={k}: answer/cost pairs differ", case.name)
                    })?;
                } else {
                    ensure(answer_set(&solutions) == answer_set(&sequential), || {
                        format!("{} dfs k={k}: answers differ", case.name)
                    })?;
                }
                if k == 1 {
                    ensure(
                        summary.events.to_csv(false) == sequential_log.events.to_csv(false),
                        || format!("{} {config:?}: k=1 log differs from the sequential log", case.name),
                    )?;
                }
            }
        }
    }
    Ok(format!("{runs} jittered runs"))
}

fn latency_overlap() -> Result<String, String> {
    let web = star(50, 0);
    let query = Query::parse(COAUTHORS, &web.prefixes).map_err(|e| e.to_string())?;
    let hub = genfixture::iri("hub");
    let timed = |k| {
        let source = Source::new(Injected::new(web.clone()).latency(Duration::from_millis(100)));
        let started = Instant::now();
        let summary = query
            .search(SearchConfig::astar().parallelism(k), hub.clone(), &source)
            .expect("valid config")
            .finish();
        (started.elapsed(), summary.events.answers())
    };
    let (one, answers_one) = timed(1);
    let (ten, answers_ten) = timed(10);
    ensure(answers_one == answers_ten, || {
        format!("{answers_one} vs {answers_ten} answers")
    })?;
    let ratio = ten.as_secs_f64() / one.as_secs_f64();
    ensure(ratio < 0.25, || {
        format!("k=10 took {ten:?}, k=1 took {one:?} (ratio {ratio:.3})")
    })?;
    Ok(format!(
        "{answers_one} answers, k=1 {one:.1?}, k=10 {ten:.1?}, ratio {ratio:.3}"
    ))
}

fn request_accounting() -> Result<String, String> {
    let mut runs = 0;
    let cases = instances()
        .take(150)
        .chain([mini_case()])
        .chain(star_cases().step_by(7));
    for case in cases {
        for config in oracle_configs() {
            let source = Source::new(case.web.clone());
            let count = |summary: &search::RunSummary| {
                let records = summary.requests.records();
                let network: Vec<&Iri> = records
                    .iter()
                    .filter(|r| r.is_request() && r.kind == RequestKind::Dereference)
                    .map(|r| &r.iri)
                    .collect();
                let distinct: BTreeSet<&Iri> = network.iter().copied().collect();
                (network.len(), distinct.len(), summary.events.requests())
            };
            let (_, first) = case.run(config, &source);
            let (network, distinct, logged) = count(&first);
            ensure(network == distinct, || {
                format!("{} {config:?}: {network} requests for {distinct} IRIs", case.name)
            })?;
            ensure(logged == network, || {
                format!("{} {config:?}: event log counts {logged}", case.name)
            })?;
            let dereferenced: BTreeSet<&Term> = first
                .events
                .of_kind(EventKind::Expansion)
                .filter(|e| !e.term.is_literal() && !case.nfa.outgoing(e.state.unwrap_or_default()).is_empty())
                .map(|e| &e.term)
                .collect();
            ensure(dereferenced.len() == distinct, || {
                format!(
                    "{} {config:?}: {} expanded IRIs, {distinct} requested",
                    case.name,
                    dereferenced.len()
                )
            })?;
            let (_, again) = case.run(config, &source);
            ensure(count(&again) == (network, distinct, logged), || {
                format!("{} {config:?}: rerun made a different number of requests", case.name)
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} run pairs"))
}

fn path_validity() -> Result<String, String> {
    let mut paths = 0;
    for case in instances()
        .take(200)
        .chain([mini_case()])
        .chain(star_cases().step_by(5))
    {
        for config in oracle_configs() {
            let (solutions, summary) = case.run_fixture(config);
            for s in &solutions {
                paths += 1;
                ensure(
                    s.path.start.term == case.start() && s.path.end().term == s.answer,
                    || format!("{}: path endpoints", case.name),
                )?;
                ensure(case.nfa.accepts(&s.path.labels()), || {
                    format!("{}: path rejected by the NFA", case.name)
                })?;
                for (from, label, to) in s.path.edges() {
                    ensure(summary.discovered.contains(from, label, to), || {
                        format!("{}: hop {from} {label:?} {to} never discovered", case.name)
                    })?;
                }
            }
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fixture_dir = dir.path().join("star");
    let web = star(12, 7);
    web.save(&fixture_dir).map_err(|e| e.to_string())?;
    let source_flag = format!("fixture:{}", fixture_dir.display());
    let runs = [
        ("mini-dblp", "fixture:mini-dblp", ":alice", mini_dblp()),
        ("star(12)", source_flag.as_str(), ":hub", web),
    ];
    for (name, source, start, web) in runs {
        for q in [COAUTHORS, "(^dc:creator/dc:creator)*/rdfs:label"] {
            let args = [
                "ldpath", "query", "--query", q, "--start", start, "--source", source, "--paths",
            ];
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = app::run(args, &mut out, &mut err);
            ensure(code == 0, || {
                format!("{name}: exit {code}: {}", String::from_utf8_lossy(&err))
            })?;
            let text = String::from_utf8(out).map_err(|e| e.to_string())?;
            let parsed = parse_blocks(&text).map_err(|e| format!("{name}: {e}"))?;
            ensure(render_blocks(&parsed) == text, || {
                format!("{name}: re-rendered blocks differ")
            })?;
            let query = Query::parse(q, &web.prefixes).map_err(|e| e.to_string())?;
            let seed = web.prefixes.expand(start).ok_or("seed")?;
            let solutions: Vec<Solution> = query
                .search(SearchConfig::astar(), seed, &Source::new(web.clone()))
                .map_err(|e| e.to_string())?
                .collect();
            let expected: Vec<PathBlock> = solutions
                .iter()
                .map(|s| PathBlock::from_path(&s.path, &web.prefixes))
                .collect();
            ensure(parsed == expected, || {
                format!("{name} {q}: parsed blocks differ from the engine's paths")
            })?;
            paths += parsed.len();
        }
    }
    Ok(format!("{paths} paths"))
}

fn star_seed_first() -> Result<String, String> {
    let mut runs = 0;
    for i in 0..INSTANCES {
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let inst = Instance {
            expr: PathExpr::star(random::expr(&mut rng, 3, 3)),
            ..instance(i)
        };
        let case = Case::from_instance(i, inst);
        for config in oracle_configs().into_iter().chain([
            SearchConfig::astar().emission(Emission::Eager),
            SearchConfig::astar().heuristic(HeuristicKind::Pathmax),
        ]) {
            let (solutions, summary) = case.run_fixture(config);
            let first = summary
                .events
                .of_kind(EventKind::Emission)
                .next()
                .ok_or("no emission")?;
            ensure(
                solutions[0].answer == case.start() && solutions[0].cost == 0 && first.requests_so_far <= 1,
                || format!("{} {config:?}: first emission {first:?}", case.name),
            )?;
            runs += 1;
        }
    }
    Ok(format!("{runs} runs"))
}

fn robustness() -> Result<String, String> {
    let mut runs = 0;
    let mut failed_docs = 0;
    let cases = instances()
        .take(150)
        .chain([mini_case()])
        .chain(star_cases().step_by(5));
    for (i, case) in cases.enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        let iris: Vec<Iri> = case.web.docs.keys().cloned().collect();
        let failing: Vec<Iri> = iris.iter().cloned().choose_multiple(&mut rng, iris.len() * 3 / 10);
        failed_docs += failing.len();
        let mut emptied = case.web.clone();
        for iri in &failing {
            emptied.insert(iri.clone(), Document::new());
        }
        let broken = Source::new(Injected::new(case.web.clone()).fail(failing.clone()));
        for config in oracle_configs() {
            let (solutions, summary) = case.run(config, &broken);
            ensure(summary.stop == Some(ldpath::StopReason::Exhausted), || {
                format!("{} {config:?}: stopped with {:?}", case.name, summary.stop)
            })?;
            let (reference, _) = case.run(config, &Source::new(emptied.clone()));
            ensure(answer_set(&solutions) == answer_set(&reference), || {
                format!("{} {config:?}: answers differ from the emptied fixture", case.name)
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, {failed_docs} failing documents"))
}
