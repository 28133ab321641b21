//! Connection-aware motifs and the motif vocabulary.
//!
//! A motif is a fragment plus one `*` atom per bond that was broken to cut it
//! out. Motif graphs are stored in canonical atom order, so a site is named
//! by the index of its `*` atom. Sites related by a symmetry of the motif
//! share a class, the smallest star index in their orbit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::chem::{canonicalize, parse_smiles, write_ranked, BondOrder, Labels, MolGraph, Style};
use crate::format::{check_header, FormatError};
use crate::ops::OpsList;
use crate::tokenizer::Tokenizer;

const VOCAB_MAGIC: &str = "graphbpe-vocab";
const ATTACH_MAGIC: &str = "graphbpe-attach";
const VERSION: &str = "v1";

/// A `*` atom of a motif.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    /// Index of the `*` atom in the canonical motif graph.
    pub atom: usize,
    /// The real atom the site hangs off.
    pub anchor: usize,
    pub order: BondOrder,
    /// Symmetry class: smallest star index in this site's orbit.
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    pub smiles: String,
    /// Canonically ordered graph: atom `i` has canonical rank `i`.
    pub graph: MolGraph,
    pub sites: Vec<Site>,
}

impl Motif {
    /// Canonicalizes a motif graph. Returns the motif and, for each atom of
    /// `graph`, its index in the canonical motif.
    pub fn from_graph(graph: &MolGraph) -> (Motif, Vec<usize>) {
        let rank = canonicalize(graph, Labels::Full, None).ranking.rank;
        let canonical = graph.permuted(&rank).with_sorted_bonds();
        let identity: Vec<usize> = (0..canonical.num_atoms()).collect();
        let smiles = write_ranked(&canonical, &identity, Style::Smiles);
        let sites = compute_sites(&canonical);
        (
            Motif {
                smiles,
                graph: canonical,
                sites,
            },
            rank,
        )
    }

    pub fn parse(smiles: &str) -> Result<Motif, crate::chem::SmilesError> {
        parse_smiles(smiles).map(|g| Motif::from_graph(&g).0)
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.graph.heavy_atoms().count()
    }

    pub fn site_at(&self, atom: usize) -> Option<&Site> {
        self.sites.iter().find(|s| s.atom == atom)
    }

    /// Type key of a site: motif string, class and bond symbol.
    pub fn site_type(&self, site: &Site) -> String {
        site_type_key(&self.smiles, site.class, site.order)
    }

    /// Compact site list as stored in vocabulary files.
    pub fn site_list(&self) -> String {
        if self.sites.is_empty() {
            return "none".to_string();
        }
        self.sites
            .iter()
            .map(|s| format!("{}@{}{}", s.atom, s.class, s.order.symbol()))
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn site_type_key(smiles: &str, class: usize, order: BondOrder) -> String {
    format!("{smiles}@{class}{}", order.symbol())
}

fn compute_sites(canonical: &MolGraph) -> Vec<Site> {
    let stars: Vec<usize> = canonical.connection_sites().collect();
    let certificates: Vec<Vec<u64>> = if stars.len() > 1 {
        stars
            .iter()
            .map(|&s| {
                let marks: Vec<u32> = (0..canonical.num_atoms()).map(|i| (i == s) as u32).collect();
                canonicalize(canonical, Labels::Full, Some(&marks)).certificate
            })
            .collect()
    } else {
        vec![Vec::new(); stars.len()]
    };
    stars
        .iter()
        .enumerate()
        .map(|(k, &atom)| {
            let (anchor, bond) = canonical.neighbors(atom)[0];
            let class = stars
                .iter()
                .zip(&certificates)
                .find(|(_, c)| **c == certificates[k])
                .map(|(&s, _)| s)
                .expect("a site is in its own orbit");
            Site {
                atom,
                anchor,
                order: canonical.bond(bond).order,
                class,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub motif: Motif,
    pub frequency: u64,
}

/// Motifs keyed by canonical string, plus counts of which site types were
/// joined by the broken bonds of the corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MotifVocabulary {
    pub entries: BTreeMap<String, VocabEntry>,
    /// Unordered site-type pairs, stored with the smaller key first.
    pub attachments: BTreeMap<(String, String), u64>,
}

impl MotifVocabulary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, smiles: &str) -> Option<&VocabEntry> {
        self.entries.get(smiles)
    }

    pub fn add_motif(&mut self, motif: Motif, count: u64) {
        self.entries
            .entry(motif.smiles.clone())
            .or_insert(VocabEntry { motif, frequency: 0 })
            .frequency += count;
    }

    pub fn add_attachment(&mut self, a: &str, b: &str, count: u64) {
        let key = if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        *self.attachments.entry(key).or_insert(0) += count;
    }

    pub fn attachment_count(&self, a: &str, b: &str) -> u64 {
        let key = if a <= b { (a, b) } else { (b, a) };
        // BTreeMap<(String, String)> cannot be queried with borrowed tuples
        self.attachments
            .get(&(key.0.to_string(), key.1.to_string()))
            .copied()
            .unwrap_or(0)
    }

    /// Total number of connection sites across motifs.
    pub fn num_sites(&self) -> usize {
        self.entries.values().map(|e| e.motif.sites.len()).sum()
    }

    pub fn vocab_text(&self) -> String {
        let mut out = format!("{VOCAB_MAGIC} {VERSION}\n");
        for (smiles, entry) in &self.entries {
            writeln!(out, "{smiles}\t{}\t{}", entry.frequency, entry.motif.site_list()).unwrap();
        }
        out
    }

    pub fn attach_text(&self) -> String {
        let mut out = format!("{ATTACH_MAGIC} {VERSION}\n");
        for ((a, b), count) in &self.attachments {
            writeln!(out, "{a}\t{b}\t{count}").unwrap();
        }
        out
    }

    /// Reads a vocabulary file. Site lists are recomputed from the motif
    /// strings and must agree with the file.
    pub fn from_vocab_text(text: &str) -> Result<MotifVocabulary, FormatError> {
        let mut lines = text.lines().enumerate();
        check_header(lines.next().map(|(_, l)| l), VOCAB_MAGIC, VERSION)?;
        let mut vocab = MotifVocabulary::default();
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |message: String| FormatError::Malformed { line: line_no, message };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(malformed("expected motif, frequency and site list".into()));
            }
            let motif = Motif::parse(fields[0]).map_err(|e| malformed(format!("bad motif: {e}")))?;
            if motif.smiles != fields[0] {
                return Err(malformed(format!("motif {:?} is not in canonical form", fields[0])));
            }
            let frequency: u64 = fields[1].parse().map_err(|_| malformed("bad frequency".into()))?;
            if motif.site_list() != fields[2] {
                return Err(malformed(format!(
                    "site list {:?} does not match motif (expected {:?})",
                    fields[2],
                    motif.site_list()
                )));
            }
            if vocab.entries.contains_key(&motif.smiles) {
                return Err(malformed(format!("duplicate motif {:?}", motif.smiles)));
            }
            vocab.add_motif(motif, frequency);
        }
        Ok(vocab)
    }

    /// Reads an attachment table into this vocabulary.
    pub fn load_attach_text(&mut self, text: &str) -> Result<(), FormatError> {
        let mut lines = text.lines().enumerate();
        check_header(lines.next().map(|(_, l)| l), ATTACH_MAGIC, VERSION)?;
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |message: &str| FormatError::Malformed {
                line: line_no,
                message: message.to_string(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(malformed("expected two site types and a count"));
            }
            for f in &fields[..2] {
                if f.rsplit_once('@').is_none() {
                    return Err(malformed("site type must look like <motif>@<class><bond>"));
                }
            }
            let count: u64 = fields[2].parse().map_err(|_| malformed("bad count"))?;
            self.add_attachment(fields[0], fields[1], count);
        }
        Ok(())
    }
}

/// Fragmentizes every corpus molecule with `ops` and collects motif
/// frequencies and site-pair counts.
pub fn build_motif_vocabulary(corpus: &[MolGraph], ops: &OpsList) -> MotifVocabulary {
    let tokenizer = Tokenizer::new(ops);
    let fragmentations: Vec<_> = corpus.par_iter().map(|m| tokenizer.fragmentize(m)).collect();
    let mut vocab = MotifVocabulary::default();
    for frag in fragmentations {
        for inst in &frag.motifs {
            match vocab.entries.get_mut(&inst.motif.smiles) {
                Some(entry) => entry.frequency += 1,
                None => vocab.add_motif(inst.motif.clone(), 1),
            }
        }
        for bond in &frag.broken_bonds {
            let [a, b] = bond.ends.map(|(m, star)| {
                let motif = &frag.motifs[m].motif;
                motif.site_type(motif.site_at(star).expect("broken bond ends at a site"))
            });
            vocab.add_attachment(&a, &b, 1);
        }
    }
    vocab
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    fn corpus(smiles: &[&str]) -> Vec<MolGraph> {
        smiles.iter().map(|s| parse_smiles(s).unwrap()).collect()
    }

    #[test]
    fn motif_sites_and_classes() {
        let m = Motif::parse("*c1ccc(*)cc1").unwrap();
        assert_eq!(m.sites.len(), 2);
        assert_eq!(m.sites[0].class, m.sites[1].class);
        assert_eq!(m.sites[0].atom, 0);
        let m = Motif::parse("*C(=O)N*").unwrap();
        assert_ne!(m.sites[0].class, m.sites[1].class);
        let m = Motif::parse("*=C").unwrap();
        assert_eq!(m.sites[0].order, BondOrder::Double);
        assert_eq!(m.site_list(), "0@0=");
        assert_eq!(Motif::parse("CC").unwrap().site_list(), "none");
    }

    #[test]
    fn atom_level_vocabulary() {
        let mols = corpus(&["CCO"]);
        let vocab = build_motif_vocabulary(&mols, &OpsList::default());
        let keys: Vec<&str> = vocab.entries.keys().map(String::as_str).collect();
        assert_eq!(keys, ["*C", "*C*", "*O"]);
        assert_eq!(vocab.get("*C").unwrap().motif.sites.len(), 1);
        assert_eq!(vocab.get("*C*").unwrap().motif.sites.len(), 2);
        assert_eq!(vocab.attachments.len(), 2);
    }

    #[test]
    fn fully_merged_molecule_gives_one_motif() {
        let mols = corpus(&["CC"]);
        let vocab = build_motif_vocabulary(&mols, &OpsList::from_patterns(&["CC"]));
        assert_eq!(vocab.len(), 1);
        let entry = vocab.get("CC").unwrap();
        assert!(entry.motif.sites.is_empty());
        assert!(vocab.attachments.is_empty());
    }

    #[test]
    fn files_roundtrip() {
        let mols = corpus(&["Brc1ccccc1", "Cc1cccc(O)c1", "CC(=O)Nc1ccc(O)cc1"]);
        let ops = crate::miner::learn_merging_operations(&mols, 4);
        let vocab = build_motif_vocabulary(&mols, &ops);
        let mut back = MotifVocabulary::from_vocab_text(&vocab.vocab_text()).unwrap();
        back.load_attach_text(&vocab.attach_text()).unwrap();
        assert_eq!(back, vocab);
    }

    #[test]
    fn tampered_files_are_rejected() {
        let text = "graphbpe-vocab v1\n*C\t3\t0@0-\n*O\tx\t0@0-\n";
        assert!(matches!(
            MotifVocabulary::from_vocab_text(text),
            Err(FormatError::Malformed { line: 3, .. })
        ));
        let text = "graphbpe-vocab v1\n*C\t3\t0@0=\n";
        assert!(matches!(
            MotifVocabulary::from_vocab_text(text),
            Err(FormatError::Malformed { line: 2, .. })
        ));
        assert!(MotifVocabulary::from_vocab_text("graphbpe-vocab v9\n")
            .unwrap_err()
            .is_version_error());
        let empty = MotifVocabulary::from_vocab_text("graphbpe-vocab v1\n").unwrap();
        assert!(empty.is_empty());
    }
}
