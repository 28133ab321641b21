//! Learning merge operations from a corpus.
//!
//! Each iteration picks the most frequent pattern among all adjacent
//! fragment pairs (ties: smallest pattern string) and merges every matching
//! pair in every molecule. Pattern counts are maintained incrementally: only
//! molecules containing the chosen pattern are touched, and within them only
//! edges around newly merged fragments are re-keyed. Molecules are processed
//! in parallel; their count updates are applied in molecule order, so the
//! result does not depend on the thread count.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::chem::MolGraph;
use crate::merging::MergingGraph;
use crate::ops::{MergeOperation, OpsList};

type KeyId = u32;

struct MolState<'a> {
    graph: MergingGraph<'a>,
    edge_keys: HashMap<(usize, usize), KeyId>,
}

/// Count changes produced by one molecule in one iteration.
#[derive(Default)]
struct Delta {
    removed: Vec<KeyId>,
    added_known: Vec<KeyId>,
    added_new: Vec<((usize, usize), String)>,
}

pub struct Miner<'a> {
    states: Vec<MolState<'a>>,
    keys: Vec<String>,
    index: HashMap<String, KeyId>,
    counts: Vec<usize>,
    /// Per pattern: molecules containing it, with multiplicity.
    occurrences: Vec<BTreeMap<usize, usize>>,
    ops: Vec<MergeOperation>,
}

impl<'a> Miner<'a> {
    pub fn new(corpus: &'a [MolGraph]) -> Self {
        let initial: Vec<(MergingGraph<'a>, Vec<((usize, usize), String)>)> = corpus
            .par_iter()
            .map(|mol| {
                let graph = MergingGraph::new(mol);
                let edges = graph
                    .frag_edges()
                    .into_iter()
                    .map(|(i, j)| ((i, j), graph.edge_key(i, j)))
                    .collect();
                (graph, edges)
            })
            .collect();
        let mut miner = Miner {
            states: Vec::with_capacity(corpus.len()),
            keys: Vec::new(),
            index: HashMap::new(),
            counts: Vec::new(),
            occurrences: Vec::new(),
            ops: Vec::new(),
        };
        for (mol_id, (graph, edges)) in initial.into_iter().enumerate() {
            let mut edge_keys = HashMap::with_capacity(edges.len());
            for (edge, key) in edges {
                let id = miner.intern(key);
                miner.add_occurrence(id, mol_id);
                edge_keys.insert(edge, id);
            }
            miner.states.push(MolState { graph, edge_keys });
        }
        miner
    }

    fn intern(&mut self, key: String) -> KeyId {
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.keys.len() as KeyId;
        self.index.insert(key.clone(), id);
        self.keys.push(key);
        self.counts.push(0);
        self.occurrences.push(BTreeMap::new());
        id
    }

    fn add_occurrence(&mut self, id: KeyId, mol: usize) {
        self.counts[id as usize] += 1;
        *self.occurrences[id as usize].entry(mol).or_insert(0) += 1;
    }

    fn remove_occurrence(&mut self, id: KeyId, mol: usize) {
        self.counts[id as usize] -= 1;
        let occ = &mut self.occurrences[id as usize];
        let m = occ.get_mut(&mol).expect("occurrence recorded");
        *m -= 1;
        if *m == 0 {
            occ.remove(&mol);
        }
    }

    /// Most frequent pattern; ties go to the smallest pattern string.
    fn best_pattern(&self) -> Option<KeyId> {
        let mut best: Option<KeyId> = None;
        for (id, &count) in self.counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => {
                    let bc = self.counts[b as usize];
                    count > bc || (count == bc && self.keys[id] < self.keys[b as usize])
                }
            };
            if better {
                best = Some(id as KeyId);
            }
        }
        best
    }

    /// Learns and applies one operation. Returns `None` once no adjacent
    /// fragment pairs remain anywhere.
    pub fn step(&mut self) -> Option<MergeOperation> {
        let op_id = self.best_pattern()?;
        let op = MergeOperation {
            rank: self.ops.len(),
            pattern: self.keys[op_id as usize].clone(),
            count: self.counts[op_id as usize],
        };
        let mut affected = vec![false; self.states.len()];
        for &mol in self.occurrences[op_id as usize].keys() {
            affected[mol] = true;
        }
        let index = &self.index;
        let deltas: Vec<(usize, Delta)> = self
            .states
            .par_iter_mut()
            .enumerate()
            .filter(|(i, _)| affected[*i])
            .map(|(i, state)| (i, state.apply(op_id, index)))
            .collect();
        for (mol, delta) in deltas {
            for id in delta.removed {
                self.remove_occurrence(id, mol);
            }
            for id in delta.added_known {
                self.add_occurrence(id, mol);
            }
            for (edge, key) in delta.added_new {
                let id = self.intern(key);
                self.add_occurrence(id, mol);
                self.states[mol].edge_keys.insert(edge, id);
            }
        }
        self.ops.push(op.clone());
        Some(op)
    }

    /// Current counts of all patterns present.
    pub fn pattern_counts(&self) -> BTreeMap<String, usize> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(id, &c)| (self.keys[id].clone(), c))
            .collect()
    }

    pub fn merging_graphs(&self) -> impl Iterator<Item = &MergingGraph<'a>> {
        self.states.iter().map(|s| &s.graph)
    }

    /// Fragment atom sets of every molecule.
    pub fn partitions(&self) -> Vec<Vec<Vec<usize>>> {
        self.states.iter().map(|s| s.graph.partition()).collect()
    }

    pub fn ops(&self) -> OpsList {
        OpsList::new(self.ops.clone())
    }

    pub fn into_ops(self) -> OpsList {
        OpsList::new(self.ops)
    }
}

impl MolState<'_> {
    fn apply(&mut self, op: KeyId, index: &HashMap<String, KeyId>) -> Delta {
        let candidates: Vec<(usize, usize)> = self
            .edge_keys
            .iter()
            .filter(|&(_, &k)| k == op)
            .map(|(&e, _)| e)
            .collect();
        let created = self.graph.merge_pass(candidates);
        let mut delta = Delta::default();
        let graph = &self.graph;
        let is_created = |f: usize| created.contains(&f);
        self.edge_keys.retain(|&(i, j), &mut key| {
            let keep = graph.fragment(i).is_some()
                && graph.fragment(j).is_some()
                && !is_created(i)
                && !is_created(j);
            if !keep {
                delta.removed.push(key);
            }
            keep
        });
        for &c in &created {
            for n in graph.neighbors(c) {
                let edge = (c.min(n), c.max(n));
                if self.edge_keys.contains_key(&edge)
                    || delta.added_new.iter().any(|(e, _)| *e == edge)
                {
                    continue;
                }
                let key = graph.edge_key(edge.0, edge.1);
                match index.get(&key) {
                    Some(&id) => {
                        self.edge_keys.insert(edge, id);
                        delta.added_known.push(id);
                    }
                    None => delta.added_new.push((edge, key)),
                }
            }
        }
        delta
    }
}

/// Learns up to `k` merge operations (fewer if merging runs out of pairs).
pub fn learn_merging_operations(corpus: &[MolGraph], k: usize) -> OpsList {
    let mut miner = Miner::new(corpus);
    for _ in 0..k {
        if miner.step().is_none() {
            break;
        }
    }
    miner.into_ops()
}
