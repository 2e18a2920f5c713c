//! Answers-versus-requests and answers-versus-time curves, one series per
//! configuration.

use std::collections::BTreeMap;
use std::io::Write;

use ldpath::search::{EventKind, RunSummary};
use ldpath::{Algorithm, HeuristicKind, Iri, Query, SearchConfig, Source};

pub const CSV_HEADER: [&str; 6] = ["algo", "k", "emission_idx", "requests_so_far", "elapsed_ms", "cost"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub emission_idx: usize,
    pub requests_so_far: usize,
    pub elapsed_ms: f64,
    pub cost: u32,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub algo: String,
    pub k: usize,
    pub rows: Vec<Row>,
    pub total_requests: usize,
    pub summary: RunSummary,
}

impl Series {
    pub fn from_summary(config: &SearchConfig, summary: RunSummary) -> Self {
        let rows = summary
            .events
            .of_kind(EventKind::Emission)
            .enumerate()
            .map(|(i, e)| Row {
                emission_idx: i,
                requests_so_far: e.requests_so_far,
                elapsed_ms: e.elapsed.as_secs_f64() * 1000.0,
                cost: e.cost.unwrap_or_default(),
            })
            .collect();
        Series {
            algo: label(config),
            k: config.parallelism,
            rows,
            total_requests: summary.events.requests(),
            summary,
        }
    }

    /// Answers emitted with at most `requests` requests made.
    pub fn answers_at(&self, requests: usize) -> usize {
        self.rows.partition_point(|r| r.requests_so_far <= requests)
    }
}

pub fn label(config: &SearchConfig) -> String {
    match (config.algorithm, config.heuristic) {
        (Algorithm::AStar, HeuristicKind::Pathmax) => "astar-pathmax".to_string(),
        (algo, _) => algo.as_str().to_string(),
    }
}

/// Runs every configuration on a fresh session of `source`.
pub fn run(
    query: &Query,
    seed: &Iri,
    source: &Source,
    configs: &[SearchConfig],
) -> Result<Vec<Series>, ldpath::search::ConfigError> {
    configs
        .iter()
        .map(|config| {
            let summary = query.search(*config, seed.clone(), source)?.finish();
            Ok(Series::from_summary(config, summary))
        })
        .collect()
}

pub fn write_csv(series: &[Series], out: impl Write) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for s in series {
        for r in &s.rows {
            writer.write_record([
                s.algo.clone(),
                s.k.to_string(),
                r.emission_idx.to_string(),
                r.requests_so_far.to_string(),
                format!("{:.3}", r.elapsed_ms),
                r.cost.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Among series with the same k, a series dominates when at no fewer than
/// `share` of the integer request counts from 0 to the largest total it has
/// at least as many answers as every other series.
pub fn dominance(series: &[Series], share: f64) -> Vec<(String, usize, bool)> {
    let mut by_k: BTreeMap<usize, Vec<&Series>> = BTreeMap::new();
    for s in series {
        by_k.entry(s.k).or_default().push(s);
    }
    let mut out = Vec::new();
    for (k, group) in by_k {
        let top = group.iter().map(|s| s.total_requests).max().unwrap_or(0);
        let points = top + 1;
        for s in &group {
            let wins = (0..=top)
                .filter(|&r| {
                    let mine = s.answers_at(r);
                    group.iter().all(|o| o.answers_at(r) <= mine)
                })
                .count();
            out.push((s.algo.clone(), k, wins as f64 >= share * points as f64));
        }
    }
    out
}
