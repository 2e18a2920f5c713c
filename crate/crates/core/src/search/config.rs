use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::heuristic::HeuristicKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Dfs,
    Bfs,
    AStar,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Dfs, Algorithm::Bfs, Algorithm::AStar];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Dfs => "dfs",
            Algorithm::Bfs => "bfs",
            Algorithm::AStar => "astar",
        }
    }
}

/// When A* reports a goal node: on extraction from the frontier, or already
/// at generation once its cost cannot be beaten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Emission {
    Extraction,
    Eager,
}

impl Emission {
    pub fn as_str(self) -> &'static str {
        match self {
            Emission::Extraction => "extraction",
            Emission::Eager => "eager",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {what} '{value}'")]
pub struct UnknownName {
    what: &'static str,
    value: String,
}

impl FromStr for Algorithm {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dfs" => Ok(Algorithm::Dfs),
            "bfs" => Ok(Algorithm::Bfs),
            "astar" | "a*" => Ok(Algorithm::AStar),
            _ => Err(UnknownName {
                what: "algorithm",
                value: s.to_string(),
            }),
        }
    }
}

impl FromStr for Emission {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "extraction" => Ok(Emission::Extraction),
            "eager" => Ok(Emission::Eager),
            _ => Err(UnknownName {
                what: "emission mode",
                value: s.to_string(),
            }),
        }
    }
}

impl FromStr for HeuristicKind {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(HeuristicKind::Plain),
            "pathmax" => Ok(HeuristicKind::Pathmax),
            _ => Err(UnknownName {
                what: "heuristic",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Emission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeuristicKind::Plain => "plain",
            HeuristicKind::Pathmax => "pathmax",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_answers: usize,
    /// The run stops once more than this many triples have been fetched.
    pub max_triples: usize,
    pub max_wall_time: Duration,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_answers: 1000,
            max_triples: 100_000,
            max_wall_time: Duration::from_secs(600),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("parallelism must be at least 1")]
    ZeroParallelism,
    #[error("limit {0} must be positive")]
    ZeroLimit(&'static str),
    #[error("the pathmax heuristic requires astar")]
    PathmaxWithoutAStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub heuristic: HeuristicKind,
    /// `None` picks extraction for the plain heuristic and eager for pathmax.
    pub emission: Option<Emission>,
    pub parallelism: usize,
    pub limits: Limits,
}

impl SearchConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SearchConfig {
            algorithm,
            heuristic: HeuristicKind::Plain,
            emission: None,
            parallelism: 1,
            limits: Limits::default(),
        }
    }

    pub fn dfs() -> Self {
        Self::new(Algorithm::Dfs)
    }

    pub fn bfs() -> Self {
        Self::new(Algorithm::Bfs)
    }

    pub fn astar() -> Self {
        Self::new(Algorithm::AStar)
    }

    pub fn heuristic(mut self, kind: HeuristicKind) -> Self {
        self.heuristic = kind;
        self
    }

    pub fn emission(mut self, emission: Emission) -> Self {
        self.emission = Some(emission);
        self
    }

    pub fn parallelism(mut self, k: usize) -> Self {
        self.parallelism = k;
        self
    }

    pub fn max_answers(mut self, n: usize) -> Self {
        self.limits.max_answers = n;
        self
    }

    pub fn max_triples(mut self, n: usize) -> Self {
        self.limits.max_triples = n;
        self
    }

    pub fn max_wall_time(mut self, d: Duration) -> Self {
        self.limits.max_wall_time = d;
        self
    }

    pub fn effective_emission(&self) -> Emission {
        self.emission.unwrap_or(match self.heuristic {
            HeuristicKind::Plain => Emission::Extraction,
            HeuristicKind::Pathmax => Emission::Eager,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.parallelism == 0 {
            return Err(ConfigError::ZeroParallelism);
        }
        if self.limits.max_answers == 0 {
            return Err(ConfigError::ZeroLimit("max-answers"));
        }
        if self.limits.max_triples == 0 {
            return Err(ConfigError::ZeroLimit("max-triples"));
        }
        if self.limits.max_wall_time.is_zero() {
            return Err(ConfigError::ZeroLimit("max-wall-time"));
        }
        if self.heuristic == HeuristicKind::Pathmax && self.algorithm != Algorithm::AStar {
            return Err(ConfigError::PathmaxWithoutAStar);
        }
        Ok(())
    }
}
