//! Argument handling and the four subcommands.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use ldpath::source::fixture::mini_dblp;
use ldpath::source::{HttpBackend, Injected, SparqlEndpoint};
use ldpath::{
    Algorithm, Emission, HeuristicKind, Iri, PrefixTable, Query, RunSummary, SearchConfig, Source, StopReason,
    WebFixture,
};
use thiserror::Error;

use crate::bench;
use crate::blocks::PathBlock;
use crate::genfixture::{self, Shape};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SETUP: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Setup(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => EXIT_USAGE,
            AppError::Setup(_) => EXIT_SETUP,
        }
    }
}

fn usage(e: impl fmt::Display) -> AppError {
    AppError::Usage(e.to_string())
}

fn setup(e: impl fmt::Display) -> AppError {
    AppError::Setup(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "ldpath",
    version,
    about = "Property-path queries over Linked Data by graph search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stream the answers of a path query from a seed IRI.
    Query(QueryArgs),
    /// Write a synthetic fixture directory.
    Genfixture(GenArgs),
    /// Answers-versus-requests curves for several configurations.
    Bench(BenchArgs),
    /// Print the automaton and heuristic tables of a query.
    Automaton(AutomatonArgs),
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// `fixture:<dir>`, `http`, or `http+endpoint:<url>`.
    #[arg(long, default_value = "http")]
    source: String,
    /// Extra latency added to every lookup.
    #[arg(long, default_value_t = 0)]
    latency_ms: u64,
    /// Per-request HTTP timeout in seconds.
    #[arg(long, default_value_t = 30)]
    http_timeout: u64,
    /// `label=namespace`, repeatable.
    #[arg(long = "prefix", value_name = "LABEL=NS")]
    prefixes: Vec<String>,
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 1000)]
    max_answers: usize,
    #[arg(long, default_value_t = 100_000)]
    max_triples: usize,
    /// Wall-time limit in seconds.
    #[arg(long, default_value_t = 600)]
    timeout: u64,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[arg(long)]
    query: String,
    /// Seed as `prefix:local`, `<iri>`, or a bare `scheme://` or `urn:` IRI.
    #[arg(long)]
    start: String,
    #[arg(long, default_value = "astar")]
    algo: Algorithm,
    #[arg(long, default_value = "plain")]
    heuristic: HeuristicKind,
    #[arg(long)]
    emission: Option<Emission>,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(flatten)]
    source: SourceArgs,
    /// Print witness paths instead of answer lines.
    #[arg(long)]
    paths: bool,
    /// Write the event log as CSV.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// `star:N`, `chain:N` or `grid:RxC`.
    shape: Shape,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    query: String,
    #[arg(long)]
    start: String,
    /// Comma-separated: dfs, bfs, astar, astar-pathmax.
    #[arg(long, value_delimiter = ',', default_value = "dfs,bfs,astar")]
    algos: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    parallel: Vec<usize>,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(flatten)]
    source: SourceArgs,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AutomatonArgs {
    #[arg(long)]
    query: String,
    #[arg(long = "prefix", value_name = "LABEL=NS")]
    prefixes: Vec<String>,
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Query(args) => cmd_query(&args, out, err),
        Command::Genfixture(args) => cmd_genfixture(&args, err),
        Command::Bench(args) => cmd_bench(&args, out, err),
        Command::Automaton(args) => cmd_automaton(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// A fully resolved backend plus the prefixes that go with it.
pub struct Setup {
    pub source: Source,
    pub prefixes: PrefixTable,
}

/// Loads `fixture:<dir>`; the name `mini-dblp` falls back to the built-in
/// fixture when no such directory exists.
pub fn load_fixture(dir: &str) -> Result<WebFixture, AppError> {
    if !Path::new(dir).exists() && dir == "mini-dblp" {
        return Ok(mini_dblp());
    }
    WebFixture::load(dir).map_err(setup)
}

fn resolve_source(args: &SourceArgs) -> Result<Setup, AppError> {
    let latency = Duration::from_millis(args.latency_ms);
    let timeout = Duration::from_secs(args.http_timeout);
    let mut prefixes = PrefixTable::common();
    let source = if let Some(dir) = args.source.strip_prefix("fixture:") {
        let fixture = load_fixture(dir)?;
        for (label, ns) in fixture.prefixes.iter() {
            prefixes.set(label, ns).map_err(setup)?;
        }
        Source::new(Injected::new(fixture).latency(latency))
    } else if args.source == "http" {
        Source::new(Injected::new(HttpBackend::new(timeout)).latency(latency))
    } else if let Some(url) = args.source.strip_prefix("http+endpoint:") {
        if !Iri::new(url).is_absolute() {
            return Err(usage(format!("endpoint URL must be absolute: {url}")));
        }
        Source::new(Injected::new(HttpBackend::new(timeout)).latency(latency))
            .with_endpoint(SparqlEndpoint::with_timeout(url, timeout))
    } else {
        return Err(usage(format!(
            "unknown source '{}' (expected fixture:<dir>, http or http+endpoint:<url>)",
            args.source
        )));
    };
    add_prefixes(&mut prefixes, &args.prefixes)?;
    Ok(Setup { source, prefixes })
}

fn add_prefixes(table: &mut PrefixTable, declarations: &[String]) -> Result<(), AppError> {
    for decl in declarations {
        let (label, ns) = PrefixTable::parse_declaration(decl).map_err(usage)?;
        table.set(label, ns).map_err(usage)?;
    }
    Ok(())
}

pub fn parse_start(text: &str, prefixes: &PrefixTable) -> Result<Iri, AppError> {
    let text = text.trim();
    if let Some(iri) = prefixes.expand(text) {
        return Ok(iri);
    }
    // an unbound `label:local` is more likely a typo than a scheme
    let bare = text.contains("://") || text.starts_with("urn:");
    let iri = Iri::new(text);
    if !bare || !iri.is_absolute() {
        return Err(usage(format!("cannot resolve start IRI '{text}'")));
    }
    Ok(iri)
}

fn limits(config: SearchConfig, args: &LimitArgs) -> SearchConfig {
    config
        .max_answers(args.max_answers)
        .max_triples(args.max_triples)
        .max_wall_time(Duration::from_secs(args.timeout))
}

/// What a run did, printed to standard error.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub query: String,
    pub seed: Iri,
    pub config: SearchConfig,
    pub stop: Option<StopReason>,
    pub answers: usize,
    pub requests: usize,
    pub triples: usize,
    pub expansions: usize,
    pub wall: Duration,
    pub metrics: Option<PathBuf>,
}

impl RunReport {
    pub fn new(query: &str, seed: Iri, config: SearchConfig, summary: &RunSummary) -> Self {
        RunReport {
            query: query.to_string(),
            seed,
            config,
            stop: summary.stop,
            answers: summary.events.answers(),
            requests: summary.events.requests(),
            triples: summary.stats.triples,
            expansions: summary.stats.expansions,
            wall: summary.elapsed,
            metrics: None,
        }
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(f, "query: {}", self.query)?;
        writeln!(f, "seed: {}", self.seed)?;
        writeln!(
            f,
            "config: algo={} heuristic={} emission={} parallel={}",
            c.algorithm,
            c.heuristic,
            c.effective_emission(),
            c.parallelism
        )?;
        let stop = self.stop.map_or("running", StopReason::as_str);
        writeln!(f, "stop: {stop}")?;
        writeln!(
            f,
            "answers: {}  requests: {}  triples: {}  expansions: {}  wall: {:.3}s",
            self.answers,
            self.requests,
            self.triples,
            self.expansions,
            self.wall.as_secs_f64()
        )?;
        if let Some(path) = &self.metrics {
            writeln!(f, "metrics: {}", path.display())?;
        }
        Ok(())
    }
}

fn cmd_query(args: &QueryArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, AppError> {
    let setup_ = resolve_source(&args.source)?;
    let prefixes = &setup_.prefixes;
    let query = Query::parse(&args.query, prefixes).map_err(usage)?;
    let seed = parse_start(&args.start, prefixes)?;
    let mut config = SearchConfig::new(args.algo)
        .heuristic(args.heuristic)
        .parallelism(args.parallel);
    if let Some(emission) = args.emission {
        config = config.emission(emission);
    }
    let config = limits(config, &args.limits);
    let mut search = query.search(config, seed.clone(), &setup_.source).map_err(usage)?;
    let io = |e: std::io::Error| setup(format!("writing output: {e}"));
    for solution in search.by_ref() {
        if args.paths {
            if solution.index > 0 {
                writeln!(out).map_err(io)?;
            }
            write!(out, "{}", PathBlock::from_path(&solution.path, prefixes).render()).map_err(io)?;
        } else {
            writeln!(out, "{}\t{}", solution.answer, solution.cost).map_err(io)?;
        }
        out.flush().map_err(io)?;
    }
    let summary = search.finish();
    let mut report = RunReport::new(&args.query, seed, config, &summary);
    if let Some(path) = &args.metrics {
        fs::write(path, summary.events.to_csv(true)).map_err(|e| setup(format!("{}: {e}", path.display())))?;
        report.metrics = Some(path.clone());
    }
    let _ = write!(err, "{report}");
    Ok(if summary.truncated() { EXIT_TRUNCATED } else { EXIT_OK })
}

fn cmd_genfixture(args: &GenArgs, err: &mut dyn Write) -> Result<i32, AppError> {
    let fixture = genfixture::generate(args.shape, args.seed).map_err(usage)?;
    fixture.save(&args.out).map_err(setup)?;
    let _ = writeln!(
        err,
        "{}: {} documents, {} triples -> {}",
        args.shape,
        fixture.docs.len(),
        fixture.union_graph().len(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn bench_config(name: &str) -> Result<SearchConfig, AppError> {
    if name == "astar-pathmax" {
        return Ok(SearchConfig::astar().heuristic(HeuristicKind::Pathmax));
    }
    name.parse::<Algorithm>().map(SearchConfig::new).map_err(usage)
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, AppError> {
    let setup_ = resolve_source(&args.source)?;
    let query = Query::parse(&args.query, &setup_.prefixes).map_err(usage)?;
    let seed = parse_start(&args.start, &setup_.prefixes)?;
    let mut configs = Vec::new();
    for &k in &args.parallel {
        for name in &args.algos {
            configs.push(limits(bench_config(name)?.parallelism(k), &args.limits));
        }
    }
    let series = bench::run(&query, &seed, &setup_.source, &configs).map_err(usage)?;
    let csv_err = |e: csv::Error| setup(format!("writing CSV: {e}"));
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| setup(format!("{}: {e}", path.display())))?;
            bench::write_csv(&series, file).map_err(csv_err)?;
        }
        None => bench::write_csv(&series, &mut *out).map_err(csv_err)?,
    }
    for (algo, k, dominant) in bench::dominance(&series, 0.8) {
        let _ = writeln!(err, "k={k} {algo}: {}", if dominant { "dominates" } else { "-" });
    }
    let truncated = series.iter().any(|s| s.summary.truncated());
    Ok(if truncated { EXIT_TRUNCATED } else { EXIT_OK })
}

fn cmd_automaton(args: &AutomatonArgs, out: &mut dyn Write) -> Result<i32, AppError> {
    let mut prefixes = PrefixTable::common();
    add_prefixes(&mut prefixes, &args.prefixes)?;
    let query = Query::parse(&args.query, &prefixes).map_err(usage)?;
    let show = |d: &[ldpath::Distance]| d.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    write!(out, "{}", query.nfa.dump(&prefixes)).map_err(setup)?;
    writeln!(out, "h: {}", show(query.heuristics.distances())).map_err(setup)?;
    writeln!(out, "pathmax: {}", show(query.heuristics.pathmax_values())).map_err(setup)?;
    Ok(EXIT_OK)
}
