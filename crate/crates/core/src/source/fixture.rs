//! Offline Webs: a fixed map from IRIs to documents.
//!
//! On disk a fixture is a directory holding `manifest.tsv` (one
//! `IRI<TAB>relative-file` line per document), the N-Triples files it names,
//! and optionally `prefixes.txt` with `label=namespace` lines.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{Backend, SourceError};
use crate::ntriples;
use crate::path::{PrefixError, PrefixTable};
use crate::syntax::SyntaxError;
use crate::term::{Document, Iri, Literal, Term, Triple};

pub const MANIFEST: &str = "manifest.tsv";
pub const PREFIXES: &str = "prefixes.txt";

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("missing manifest {0}")]
    MissingManifest(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("manifest line {line}: IRI {iri} listed twice")]
    DuplicateIri { line: usize, iri: String },
    #[error("{file}: {error}")]
    Syntax { file: PathBuf, error: SyntaxError },
    #[error("{PREFIXES}: {0}")]
    Prefix(#[from] PrefixError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FixtureError + '_ {
    move |source| FixtureError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WebFixture {
    pub docs: BTreeMap<Iri, Document>,
    pub prefixes: PrefixTable,
}

impl WebFixture {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, iri: impl Into<Iri>, doc: Document) {
        self.docs.insert(iri.into(), doc);
    }

    /// The document for `iri`, empty when unmapped.
    pub fn document(&self, iri: &Iri) -> Document {
        self.docs.get(iri).cloned().unwrap_or_default()
    }

    /// A fixture where every IRI of `graph` dereferences to all triples that
    /// mention it, as subject or object.
    pub fn complete(graph: &Document) -> Self {
        let mut docs: BTreeMap<Iri, Document> = BTreeMap::new();
        for triple in graph {
            for term in [&triple.subject, &triple.object] {
                if let Term::Iri(iri) = term {
                    docs.entry(iri.clone()).or_default().insert(triple.clone());
                }
            }
        }
        WebFixture {
            docs,
            prefixes: PrefixTable::new(),
        }
    }

    /// Every triple of every document.
    pub fn union_graph(&self) -> Document {
        self.docs.values().flat_map(|d| d.iter().cloned()).collect()
    }

    pub fn triple_count(&self) -> usize {
        self.docs.values().map(Document::len).sum()
    }

    /// IRI in the fixture's default (empty-prefix) namespace.
    pub fn iri(&self, local: &str) -> Iri {
        let ns = self.prefixes.namespace("").unwrap_or_default();
        Iri::new(format!("{ns}{local}"))
    }

    pub fn term(&self, local: &str) -> Term {
        Term::Iri(self.iri(local))
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, FixtureError> {
        let dir = dir.as_ref();
        let manifest_path = dir.join(MANIFEST);
        if !manifest_path.is_file() {
            return Err(FixtureError::MissingManifest(manifest_path));
        }
        let manifest = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        let mut fixture = WebFixture::new();
        for (idx, line) in manifest.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [iri, file] = fields[..] else {
                return Err(FixtureError::Manifest {
                    line: line_no,
                    message: format!("expected 2 tab-separated fields, found {}", fields.len()),
                });
            };
            let iri = iri.trim();
            let iri = iri.strip_prefix('<').and_then(|i| i.strip_suffix('>')).unwrap_or(iri);
            let iri = Iri::new(iri);
            if !iri.is_absolute() {
                return Err(FixtureError::Manifest {
                    line: line_no,
                    message: format!("not an absolute IRI: {}", iri.as_str()),
                });
            }
            if fixture.docs.contains_key(&iri) {
                return Err(FixtureError::DuplicateIri {
                    line: line_no,
                    iri: iri.as_str().to_string(),
                });
            }
            let path = dir.join(file.trim());
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            let doc = ntriples::parse(&text).map_err(|error| FixtureError::Syntax { file: path, error })?;
            fixture.docs.insert(iri, doc);
        }
        let prefixes_path = dir.join(PREFIXES);
        if prefixes_path.is_file() {
            let text = fs::read_to_string(&prefixes_path).map_err(io_err(&prefixes_path))?;
            fixture.prefixes = PrefixTable::parse_lines(&text)?;
        }
        Ok(fixture)
    }

    /// Writes the manifest, one `doc-NNNN.nt` file per document in IRI order,
    /// and `prefixes.txt` when prefixes are set.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), FixtureError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut manifest = String::new();
        for (idx, (iri, doc)) in self.docs.iter().enumerate() {
            let file = format!("doc-{idx:04}.nt");
            manifest.push_str(&format!("{}\t{file}\n", iri.as_str()));
            let path = dir.join(&file);
            fs::write(&path, ntriples::serialize(doc)).map_err(io_err(&path))?;
        }
        let path = dir.join(MANIFEST);
        fs::write(&path, manifest).map_err(io_err(&path))?;
        if self.prefixes.iter().next().is_some() {
            let text: String = self.prefixes.iter().map(|(l, ns)| format!("{l}={ns}\n")).collect();
            let path = dir.join(PREFIXES);
            fs::write(&path, text).map_err(io_err(&path))?;
        }
        Ok(())
    }
}

impl Backend for WebFixture {
    fn name(&self) -> &str {
        "fixture"
    }

    fn fetch(&self, iri: &Iri) -> Result<Document, SourceError> {
        Ok(self.document(iri))
    }
}

pub const MINI_DBLP_NS: &str = "http://example.org/dblp/";
const DC_CREATOR: &str = "http://purl.org/dc/elements/1.1/creator";
const FOAF_NAME: &str = "http://xmlns.com/foaf/0.1/name";

/// Three authors and two papers: alice and bob wrote p1, bob and carol wrote
/// p2. Nine triples across five documents; alice's document also carries her
/// name.
pub fn mini_dblp() -> WebFixture {
    let mut fixture = WebFixture {
        prefixes: PrefixTable::common(),
        ..WebFixture::default()
    };
    fixture.prefixes.insert("", MINI_DBLP_NS).expect("fresh label");
    let t = |local: &str| Term::iri(format!("{MINI_DBLP_NS}{local}"));
    let wrote = |paper: &str, author: &str| Triple::new(t(paper), DC_CREATOR, t(author));
    let docs = [
        (
            "alice",
            vec![
                wrote("p1", "alice"),
                Triple::new(t("alice"), FOAF_NAME, Literal::simple("Alice")),
            ],
        ),
        ("bob", vec![wrote("p1", "bob"), wrote("p2", "bob")]),
        ("carol", vec![wrote("p2", "carol")]),
        ("p1", vec![wrote("p1", "alice"), wrote("p1", "bob")]),
        ("p2", vec![wrote("p2", "bob"), wrote("p2", "carol")]),
    ];
    for (local, triples) in docs {
        fixture.insert(
            Iri::new(format!("{MINI_DBLP_NS}{local}")),
            triples.into_iter().collect(),
        );
    }
    fixture
}
