//! Applying learned merge operations to molecules: fragmentation into
//! motifs and extraction of generation trajectories.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chem::{Atom, BondOrder, MolGraph};
use crate::merging::MergingGraph;
use crate::ops::OpsList;
use crate::vocab::Motif;

/// One motif occurrence inside a fragmented molecule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifInstance {
    pub motif: Motif,
    /// For each atom of the canonical motif graph: the molecule atom it came
    /// from, or `None` for a `*` site.
    pub source_atoms: Vec<Option<usize>>,
    /// For each atom of the canonical motif graph: the broken molecule bond a
    /// `*` site stands for.
    pub site_bonds: Vec<Option<usize>>,
}

impl MotifInstance {
    fn min_source_rank(&self, rank: &[usize]) -> usize {
        self.source_atoms
            .iter()
            .flatten()
            .map(|&a| rank[a])
            .min()
            .unwrap_or(usize::MAX)
    }
}

/// A bond cut between two motifs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrokenBond {
    /// Bond index in the molecule.
    pub bond: usize,
    pub order: BondOrder,
    /// `(motif index, star atom in that motif)` for both ends.
    pub ends: [(usize, usize); 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragmentation {
    pub motifs: Vec<MotifInstance>,
    pub broken_bonds: Vec<BrokenBond>,
}

impl Fragmentation {
    pub fn motif_strings(&self) -> Vec<&str> {
        self.motifs.iter().map(|m| m.motif.smiles.as_str()).collect()
    }
}

/// A generation decision for the site at the head of the queue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// Attach a vocabulary motif through its site at star index `site`.
    Attach { motif: String, site: usize },
    /// Bond to another open site of the partial molecule (by atom id).
    Cyclize(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    /// Atom id of the focused site in the partial molecule.
    pub focus: usize,
    #[serde(flatten)]
    pub decision: Decision,
}

/// Recorded decisions that rebuild a molecule from its motifs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start: String,
    pub steps: Vec<Step>,
}

impl Trajectory {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trajectory serializes")
    }

    pub fn from_json(line: &str) -> Result<Trajectory, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// Applies an operation list to molecules.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    ops: OpsList,
    rank_of: HashMap<String, usize>,
}

impl Tokenizer {
    pub fn new(ops: &OpsList) -> Self {
        let mut rank_of = HashMap::new();
        for (rank, pattern) in ops.patterns().enumerate() {
            rank_of.entry(pattern.to_string()).or_insert(rank);
        }
        Tokenizer {
            ops: ops.clone(),
            rank_of,
        }
    }

    pub fn ops(&self) -> &OpsList {
        &self.ops
    }

    /// Runs every operation in order. Edge patterns are cached and only
    /// recomputed around merged fragments; operations with no matching edge
    /// are skipped directly.
    pub fn apply<'a>(&self, mol: &'a MolGraph) -> MergingGraph<'a> {
        let mut graph = MergingGraph::new(mol);
        if self.ops.is_empty() {
            return graph;
        }
        let mut edge_ops: HashMap<(usize, usize), Option<usize>> = graph
            .frag_edges()
            .into_iter()
            .map(|(i, j)| ((i, j), self.rank_of.get(&graph.edge_key(i, j)).copied()))
            .collect();
        let mut next = 0;
        loop {
            let Some(k) = edge_ops.values().flatten().copied().filter(|&r| r >= next).min() else {
                break;
            };
            let candidates: Vec<(usize, usize)> = edge_ops
                .iter()
                .filter(|&(_, &r)| r == Some(k))
                .map(|(&e, _)| e)
                .collect();
            let created = graph.merge_pass(candidates);
            edge_ops.retain(|&(i, j), _| {
                graph.fragment(i).is_some()
                    && graph.fragment(j).is_some()
                    && !created.contains(&i)
                    && !created.contains(&j)
            });
            for &c in &created {
                for n in graph.neighbors(c) {
                    let edge = (c.min(n), c.max(n));
                    if !edge_ops.contains_key(&edge) {
                        let rank = self.rank_of.get(&graph.edge_key(edge.0, edge.1)).copied();
                        edge_ops.insert(edge, rank);
                    }
                }
            }
            next = k + 1;
        }
        graph
    }

    /// Cuts the molecule into motifs. Motifs are listed by the smallest
    /// canonical rank of their atoms; broken bonds by bond index.
    pub fn fragmentize(&self, mol: &MolGraph) -> Fragmentation {
        fragmentation_of(&self.apply(mol))
    }

    pub fn extract_trajectory(&self, mol: &MolGraph) -> Trajectory {
        let graph = self.apply(mol);
        let frag = fragmentation_of(&graph);
        trajectory_of(&frag, graph.atom_ranks())
    }
}

pub fn apply_operations<'a>(mol: &'a MolGraph, ops: &OpsList) -> MergingGraph<'a> {
    Tokenizer::new(ops).apply(mol)
}

pub fn fragmentize(mol: &MolGraph, ops: &OpsList) -> Fragmentation {
    Tokenizer::new(ops).fragmentize(mol)
}

pub fn extract_trajectory(mol: &MolGraph, ops: &OpsList) -> Trajectory {
    Tokenizer::new(ops).extract_trajectory(mol)
}

/// Builds motif instances from a merging graph.
pub fn fragmentation_of(graph: &MergingGraph<'_>) -> Fragmentation {
    let mol = graph.mol();
    let mut frags: Vec<(usize, &[usize])> = graph
        .fragments()
        .map(|(id, f)| (id, f.atoms.as_slice()))
        .collect();
    frags.sort_by_key(|&(id, _)| graph.min_rank(id));
    let mut motif_of_fragment = HashMap::new();
    let mut motifs = Vec::with_capacity(frags.len());
    // (bond, motif index, star atom) for each cut bond end
    let mut ends: Vec<(usize, usize, usize)> = Vec::new();
    for (m, &(id, atoms)) in frags.iter().enumerate() {
        motif_of_fragment.insert(id, m);
        let mut g = MolGraph::new();
        let mut source = Vec::new();
        let mut site_bond = Vec::new();
        let mut local = HashMap::new();
        for &a in atoms {
            local.insert(a, g.add_atom(*mol.atom(a)));
            source.push(Some(a));
            site_bond.push(None);
        }
        for &a in atoms {
            for &(b, bond) in mol.neighbors(a) {
                let order = mol.bond(bond).order;
                match local.get(&b) {
                    Some(&lb) if a < b => {
                        g.add_bond(local[&a], lb, order).expect("induced bond");
                    }
                    Some(_) => {}
                    None => {
                        let star = g.add_atom(Atom::star());
                        g.add_bond(local[&a], star, order).expect("site bond");
                        source.push(None);
                        site_bond.push(Some(bond));
                    }
                }
            }
        }
        let (motif, rank) = Motif::from_graph(&g);
        let mut source_atoms = vec![None; rank.len()];
        let mut site_bonds = vec![None; rank.len()];
        for (i, &r) in rank.iter().enumerate() {
            source_atoms[r] = source[i];
            site_bonds[r] = site_bond[i];
            if let Some(bond) = site_bond[i] {
                ends.push((bond, m, r));
            }
        }
        motifs.push(MotifInstance {
            motif,
            source_atoms,
            site_bonds,
        });
    }
    ends.sort_unstable();
    let broken_bonds = ends
        .chunks(2)
        .map(|pair| {
            debug_assert_eq!(pair[0].0, pair[1].0);
            BrokenBond {
                bond: pair[0].0,
                order: mol.bond(pair[0].0).order,
                ends: [(pair[0].1, pair[0].2), (pair[1].1, pair[1].2)],
            }
        })
        .collect();
    Fragmentation {
        motifs,
        broken_bonds,
    }
}

/// Orders the reassembly of `frag` the way the generator would: start from
/// the largest motif, then resolve open sites first-in first-out, each
/// motif's sites entering the queue in canonical order.
///
/// Atom ids follow the generator's allocation: the start motif's atoms take
/// ids in canonical order, and each attached motif appends its atoms, minus
/// the consumed site, in canonical order.
pub fn trajectory_of(frag: &Fragmentation, rank: &[usize]) -> Trajectory {
    let start = (0..frag.motifs.len())
        .min_by(|&a, &b| {
            let (ma, mb) = (&frag.motifs[a], &frag.motifs[b]);
            mb.motif
                .heavy_atom_count()
                .cmp(&ma.motif.heavy_atom_count())
                .then_with(|| ma.motif.smiles.cmp(&mb.motif.smiles))
                .then_with(|| ma.min_source_rank(rank).cmp(&mb.min_source_rank(rank)))
        })
        .expect("a molecule has at least one motif");

    // other end of each (motif, star)
    let mut partner: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for b in &frag.broken_bonds {
        partner.insert(b.ends[0], b.ends[1]);
        partner.insert(b.ends[1], b.ends[0]);
    }

    let mut arena_id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut next_id = 0;
    let mut placed = vec![false; frag.motifs.len()];
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let mut place = |m: usize,
                     skip: Option<usize>,
                     queue: &mut VecDeque<(usize, usize)>,
                     arena_id: &mut HashMap<(usize, usize), usize>| {
        let motif = &frag.motifs[m].motif;
        for atom in 0..motif.graph.num_atoms() {
            if Some(atom) == skip {
                continue;
            }
            arena_id.insert((m, atom), next_id);
            next_id += 1;
            if motif.graph.atom(atom).is_connection_site() {
                queue.push_back((m, atom));
            }
        }
    };
    place(start, None, &mut queue, &mut arena_id);
    placed[start] = true;

    let mut steps = Vec::new();
    while let Some(focus) = queue.pop_front() {
        let other = partner[&focus];
        let focus_id = arena_id[&focus];
        if placed[other.0] {
            queue.retain(|&s| s != other);
            steps.push(Step {
                focus: focus_id,
                decision: Decision::Cyclize(arena_id[&other]),
            });
        } else {
            placed[other.0] = true;
            steps.push(Step {
                focus: focus_id,
                decision: Decision::Attach {
                    motif: frag.motifs[other.0].motif.smiles.clone(),
                    site: other.1,
                },
            });
            place(other.0, Some(other.1), &mut queue, &mut arena_id);
        }
    }
    Trajectory {
        start: frag.motifs[start].motif.smiles.clone(),
        steps,
    }
}
