//! Corpus files: one SMILES per line, optionally followed by a tab and an
//! id. Blank lines and lines starting with `#` are skipped. Molecules
//! without an id are named by their 1-based line number.

use thiserror::Error;

use crate::chem::{parse_smiles, MolGraph, SmilesError};

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub line: usize,
    pub id: String,
    pub smiles: String,
    pub mol: MolGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {source}")]
pub struct CorpusError {
    pub line: usize,
    #[source]
    pub source: SmilesError,
}

/// A corpus line before parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusLine<'a> {
    pub line: usize,
    pub id: String,
    pub smiles: &'a str,
}

pub fn corpus_lines(text: &str) -> Vec<CorpusLine<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = i + 1;
            let trimmed = raw.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                return None;
            }
            let mut parts = trimmed.splitn(2, '\t');
            let smiles = parts.next().unwrap_or("").trim();
            let id = parts
                .next()
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map_or_else(|| line.to_string(), str::to_string);
            Some(CorpusLine { line, id, smiles })
        })
        .collect()
}

/// Parses every line; each entry keeps its own result.
pub fn parse_corpus_lenient(text: &str) -> Vec<(CorpusLine<'_>, Result<MolGraph, CorpusError>)> {
    corpus_lines(text)
        .into_iter()
        .map(|l| {
            let parsed = parse_smiles(l.smiles).map_err(|source| CorpusError { line: l.line, source });
            (l, parsed)
        })
        .collect()
}

/// Parses a corpus, failing on the first bad line.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    parse_corpus_lenient(text)
        .into_iter()
        .map(|(l, r)| {
            r.map(|mol| CorpusEntry {
                line: l.line,
                id: l.id,
                smiles: l.smiles.to_string(),
                mol,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_comments_and_blank_lines() {
        let text = "# header\nCC\tethane\n\nCCO\n";
        let entries = parse_corpus(text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].id, "ethane");
        assert_eq!(entries[1].id, "4");
        assert_eq!(entries[1].line, 4);
    }

    #[test]
    fn error_carries_line_number() {
        let err = parse_corpus("CC\nC(C\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.to_string().starts_with("line 2:"));
    }

    #[test]
    fn empty_corpus() {
        assert!(parse_corpus("").unwrap().is_empty());
    }
}
