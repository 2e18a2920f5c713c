//! Witness paths as text blocks: the seed on its own line, then one indented
//! line per hop with the label right-aligned and the term after it. Blocks
//! are separated by a blank line.
//!
//! ```text
//! :alice
//!   ^dc:creator  :p1
//!    dc:creator  :bob
//! ```

use ldpath::path::PrefixTable;
use ldpath::search::show_term;
use ldpath::WitnessPath;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathBlock {
    pub seed: String,
    /// (label, term) per hop.
    pub hops: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("line {0}: hop line outside a block")]
    Orphan(usize),
    #[error("line {0}: expected 'label  term'")]
    Hop(usize),
}

impl PathBlock {
    pub fn from_path(path: &WitnessPath, prefixes: &PrefixTable) -> Self {
        PathBlock {
            seed: show_term(&path.start.term, prefixes),
            hops: path
                .hops
                .iter()
                .map(|(label, node)| (label.show(prefixes), show_term(&node.term, prefixes)))
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        let width = self.hops.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0);
        let mut out = format!("{}\n", self.seed);
        for (label, term) in &self.hops {
            out.push_str(&format!("  {label:>width$}  {term}\n"));
        }
        out
    }
}

pub fn render_blocks(blocks: &[PathBlock]) -> String {
    blocks.iter().map(PathBlock::render).collect::<Vec<_>>().join("\n")
}

pub fn parse_blocks(text: &str) -> Result<Vec<PathBlock>, BlockError> {
    let mut blocks: Vec<PathBlock> = Vec::new();
    let mut open = false;
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            open = false;
            continue;
        }
        if !line.starts_with(' ') {
            blocks.push(PathBlock {
                seed: line.trim_end().to_string(),
                hops: Vec::new(),
            });
            open = true;
            continue;
        }
        if !open {
            return Err(BlockError::Orphan(idx + 1));
        }
        let (label, term) = line
            .trim_start()
            .split_once(char::is_whitespace)
            .ok_or(BlockError::Hop(idx + 1))?;
        let term = term.trim_start();
        if term.is_empty() {
            return Err(BlockError::Hop(idx + 1));
        }
        let block = blocks.last_mut().expect("open block");
        block.hops.push((label.to_string(), term.to_string()));
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PathBlock {
        PathBlock {
            seed: "dblpAuthor:Michael_Stonebraker".into(),
            hops: vec![
                ("^dc:creator".into(), "dblpPub:conf/acm/MuthuswamyKZSPJ85".into()),
                ("dc:creator".into(), "dblpAuthor:Matthias_Jarke".into()),
                ("rdfs:label".into(), "\"Matthias Jarke\"".into()),
            ],
        }
    }

    #[test]
    fn renders_with_aligned_labels() {
        assert_eq!(
            sample().render(),
            "dblpAuthor:Michael_Stonebraker\n  \
             ^dc:creator  dblpPub:conf/acm/MuthuswamyKZSPJ85\n   \
             dc:creator  dblpAuthor:Matthias_Jarke\n   \
             rdfs:label  \"Matthias Jarke\"\n"
        );
    }

    #[test]
    fn round_trip() {
        let blocks = vec![
            sample(),
            PathBlock {
                seed: ":alice".into(),
                hops: vec![],
            },
            sample(),
        ];
        assert_eq!(parse_blocks(&render_blocks(&blocks)).unwrap(), blocks);
    }

    #[test]
    fn malformed() {
        assert_eq!(parse_blocks("  ^p  x\n"), Err(BlockError::Orphan(1)));
        assert_eq!(parse_blocks(":a\n  ^p\n"), Err(BlockError::Hop(2)));
    }
}
