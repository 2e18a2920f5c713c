//! Property-path queries answered over Linked Data by traversal.
//!
//! A query such as `(^dc:creator/dc:creator)*` is compiled to an automaton
//! over IRIs and their inverses. Starting from a seed IRI, the engine searches
//! the product of the Web graph (revealed one dereference at a time) and that
//! automaton with DFS, BFS or A*, streaming answers as they are found.
//!
//! ```
//! use ldpath::{Query, Source, SearchConfig, source::fixture::mini_dblp};
//!
//! let web = mini_dblp();
//! let query = Query::parse("(^dc:creator/dc:creator)*", &web.prefixes).unwrap();
//! let source = Source::new(web.clone());
//! let answers: Vec<_> = query
//!     .search(SearchConfig::astar(), web.iri("alice"), &source)
//!     .unwrap()
//!     .map(|s| (s.answer, s.cost))
//!     .collect();
//! assert_eq!(answers, vec![(web.term("alice"), 0), (web.term("bob"), 2), (web.term("carol"), 4)]);
//! ```

pub mod heuristic;
pub mod nfa;
pub mod ntriples;
pub mod oracle;
pub mod parallel;
pub mod path;
pub mod random;
pub mod search;
pub mod source;
pub mod syntax;
pub mod term;
pub mod turtle;

pub use heuristic::{Distance, HeuristicKind, HeuristicTable};
pub use nfa::{compile, Label, Nfa, StateId};
pub use path::{PathError, PathExpr, PrefixTable};
pub use search::{
    Algorithm, Emission, ProductNode, RunSummary, Search, SearchConfig, Solution, StopReason, WitnessPath,
};
pub use source::{Source, WebFixture};
pub use term::{Document, Iri, Literal, Term, Triple};

/// A parsed query with its automaton and heuristic tables.
#[derive(Debug, Clone)]
pub struct Query {
    pub expr: PathExpr,
    pub nfa: Nfa,
    pub heuristics: HeuristicTable,
}

impl Query {
    pub fn new(expr: PathExpr) -> Self {
        let nfa = compile(&expr);
        let heuristics = HeuristicTable::new(&nfa);
        Query { expr, nfa, heuristics }
    }

    pub fn parse(text: &str, prefixes: &PrefixTable) -> Result<Self, PathError> {
        Ok(Self::new(path::parse(text, prefixes)?))
    }

    pub fn search(&self, config: SearchConfig, seed: Iri, source: &Source) -> Result<Search<'_>, search::ConfigError> {
        Search::new(config, &self.nfa, &self.heuristics, seed, source)
    }
}
