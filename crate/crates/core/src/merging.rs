//! Merging graphs: a partition of a molecule's atoms into connected
//! fragments, with two fragments adjacent when a bond joins them.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::chem::{canonical_rank, write_pattern, MolGraph};

/// A set of atoms of one molecule, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fragment {
    pub atoms: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("fragments {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("fragment {0} does not exist")]
    NoSuchFragment(usize),
}

/// Union of two fragments of `mol`. Every bond between them becomes part of
/// the induced subgraph of the result.
pub fn merge_fragments(mol: &MolGraph, fi: &Fragment, fj: &Fragment) -> Result<Fragment, MergeError> {
    let adjacent = fi
        .atoms
        .iter()
        .any(|&a| mol.neighbors(a).iter().any(|&(b, _)| fj.atoms.binary_search(&b).is_ok()));
    if !adjacent {
        return Err(MergeError::NotAdjacent(
            fi.atoms.first().copied().unwrap_or(0),
            fj.atoms.first().copied().unwrap_or(0),
        ));
    }
    let mut atoms: Vec<usize> = fi.atoms.iter().chain(&fj.atoms).copied().collect();
    atoms.sort_unstable();
    atoms.dedup();
    Ok(Fragment { atoms })
}

/// Hydrogen-free canonical pattern of the subgraph induced by `atoms`.
pub fn pattern_key(mol: &MolGraph, atoms: &[usize]) -> String {
    write_pattern(&mol.induced_subgraph(atoms))
}

/// Pattern of the union of two fragments.
pub fn pair_key(mol: &MolGraph, a: &[usize], b: &[usize]) -> String {
    let mut atoms: Vec<usize> = a.iter().chain(b).copied().collect();
    atoms.sort_unstable();
    pattern_key(mol, &atoms)
}

/// Fragment state of one molecule.
#[derive(Debug, Clone)]
pub struct MergingGraph<'a> {
    mol: &'a MolGraph,
    rank: Vec<usize>,
    frag_of: Vec<usize>,
    fragments: Vec<Option<Fragment>>,
    min_rank: Vec<usize>,
}

impl<'a> MergingGraph<'a> {
    /// One fragment per atom; fragment `i` holds atom `i`.
    pub fn new(mol: &'a MolGraph) -> Self {
        let rank = canonical_rank(mol).rank;
        let n = mol.num_atoms();
        MergingGraph {
            mol,
            min_rank: rank.clone(),
            rank,
            frag_of: (0..n).collect(),
            fragments: (0..n).map(|i| Some(Fragment { atoms: vec![i] })).collect(),
        }
    }

    pub fn mol(&self) -> &'a MolGraph {
        self.mol
    }

    /// Canonical rank of each atom of the molecule.
    pub fn atom_ranks(&self) -> &[usize] {
        &self.rank
    }

    pub fn fragment(&self, id: usize) -> Option<&Fragment> {
        self.fragments.get(id).and_then(Option::as_ref)
    }

    pub fn fragment_of(&self, atom: usize) -> usize {
        self.frag_of[atom]
    }

    /// Live fragments as `(id, fragment)`.
    pub fn fragments(&self) -> impl Iterator<Item = (usize, &Fragment)> {
        self.fragments
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.as_ref().map(|f| (i, f)))
    }

    pub fn num_fragments(&self) -> usize {
        self.fragments.iter().filter(|f| f.is_some()).count()
    }

    /// Smallest canonical atom rank inside a fragment.
    pub fn min_rank(&self, id: usize) -> usize {
        self.min_rank[id]
    }

    /// Adjacent fragment pairs `(i, j)` with `i < j`.
    pub fn frag_edges(&self) -> BTreeSet<(usize, usize)> {
        self.mol
            .bonds()
            .iter()
            .filter_map(|b| {
                let (x, y) = (self.frag_of[b.a], self.frag_of[b.b]);
                (x != y).then(|| (x.min(y), x.max(y)))
            })
            .collect()
    }

    /// Fragments adjacent to `id`.
    pub fn neighbors(&self, id: usize) -> BTreeSet<usize> {
        let Some(f) = self.fragment(id) else {
            return BTreeSet::new();
        };
        f.atoms
            .iter()
            .flat_map(|&a| self.mol.neighbors(a))
            .map(|&(b, _)| self.frag_of[b])
            .filter(|&other| other != id)
            .collect()
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        i != j
            && self.fragment(i).is_some_and(|f| {
                f.atoms
                    .iter()
                    .any(|&a| self.mol.neighbors(a).iter().any(|&(b, _)| self.frag_of[b] == j))
            })
    }

    /// Pattern of the union of two fragments.
    pub fn edge_key(&self, i: usize, j: usize) -> String {
        pair_key(
            self.mol,
            &self.fragments[i].as_ref().expect("live fragment").atoms,
            &self.fragments[j].as_ref().expect("live fragment").atoms,
        )
    }

    /// Position of an edge in the merge scan: fragments compared by their
    /// smallest canonical atom rank.
    pub fn scan_key(&self, i: usize, j: usize) -> (usize, usize) {
        let (a, b) = (self.min_rank[i], self.min_rank[j]);
        (a.min(b), a.max(b))
    }

    /// Merges fragment `j` into `i`, returning the surviving id (the smaller).
    pub fn merge(&mut self, i: usize, j: usize) -> Result<usize, MergeError> {
        for id in [i, j] {
            if self.fragment(id).is_none() {
                return Err(MergeError::NoSuchFragment(id));
            }
        }
        if !self.are_adjacent(i, j) {
            return Err(MergeError::NotAdjacent(i, j));
        }
        let (keep, gone) = (i.min(j), i.max(j));
        let removed = self.fragments[gone].take().expect("checked live");
        for &a in &removed.atoms {
            self.frag_of[a] = keep;
        }
        let merged = self.fragments[keep].as_mut().expect("checked live");
        merged.atoms.extend(removed.atoms);
        merged.atoms.sort_unstable();
        self.min_rank[keep] = self.min_rank[keep].min(self.min_rank[gone]);
        Ok(keep)
    }

    /// One pass of a merge operation over the given candidate edges (those
    /// whose pattern equals the operation). Edges are taken in scan order and
    /// skipped when either side was already merged in this pass. Returns the
    /// surviving ids of fragments created by the pass.
    pub fn merge_pass(&mut self, mut candidates: Vec<(usize, usize)>) -> Vec<usize> {
        candidates.sort_by_key(|&(i, j)| (self.scan_key(i, j), i.min(j), i.max(j)));
        let mut touched = vec![false; self.fragments.len()];
        let mut created = Vec::new();
        for (i, j) in candidates {
            if touched[i] || touched[j] {
                continue;
            }
            touched[i] = true;
            touched[j] = true;
            let keep = self.merge(i, j).expect("candidate edges are adjacent live fragments");
            created.push(keep);
        }
        created
    }

    /// Applies one operation by recomputing every edge's pattern.
    pub fn apply_operation(&mut self, pattern: &str) -> usize {
        let candidates: Vec<(usize, usize)> = self
            .frag_edges()
            .into_iter()
            .filter(|&(i, j)| self.edge_key(i, j) == pattern)
            .collect();
        self.merge_pass(candidates).len()
    }

    /// Atom sets of live fragments, in fragment-id order.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        self.fragments().map(|(_, f)| f.atoms.clone()).collect()
    }
}

/// Pattern counts over the adjacent fragment pairs of all merging graphs.
pub fn count_pair_patterns(states: &[MergingGraph<'_>]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for state in states {
        for (i, j) in state.frag_edges() {
            *counts.entry(state.edge_key(i, j)).or_insert(0) += 1;
        }
    }
    counts
}
