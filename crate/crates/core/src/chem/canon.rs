//! Canonical atom ranking.
//!
//! Atoms are first colored by an invariant tuple (element, charge, aromatic
//! flag, degree, hydrogens and an optional caller-supplied mark). Colors are
//! refined against sorted neighbor (color, bond order) signatures until
//! stable. If ties remain, the first non-singleton class is individualized
//! atom by atom and the search keeps the leaf whose certificate (atom labels
//! in rank order plus the relabeled bond list) is smallest. Automorphisms
//! discovered on the way prune equivalent branches.
//!
//! Colors are always "number of atoms with a strictly smaller color", so a
//! discrete coloring is directly a rank permutation.

use super::mol::MolGraph;

/// Per-atom canonical positions, a permutation of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalRanking {
    pub rank: Vec<usize>,
}

impl CanonicalRanking {
    /// Atom index at each rank.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.rank.len()];
        for (atom, &r) in self.rank.iter().enumerate() {
            order[r] = atom;
        }
        order
    }
}

/// Which atom attributes seed the ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Labels {
    /// Element, charge, aromaticity, degree and hydrogen count.
    Full,
    /// As `Full` but ignoring hydrogens, for hydrogen-free pattern keys.
    HeavyOnly,
}

/// Canonical ranking together with an isomorphism certificate: two graphs
/// (with the same label mode and marks) are isomorphic iff their
/// certificates are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub ranking: CanonicalRanking,
    pub certificate: Vec<u64>,
}

pub fn canonical_rank(mol: &MolGraph) -> CanonicalRanking {
    canonicalize(mol, Labels::Full, None).ranking
}

/// Canonicalizes `mol`. `marks`, when given, holds one extra label per atom
/// that takes part in the ranking (used to tell sites apart).
pub fn canonicalize(mol: &MolGraph, labels: Labels, marks: Option<&[u32]>) -> Canonical {
    let n = mol.num_atoms();
    let invariants: Vec<u64> = (0..n)
        .map(|i| atom_invariant(mol, i, labels, marks.map_or(0, |m| m[i])))
        .collect();
    let mut search = Search {
        mol,
        invariants: &invariants,
        best: None,
        automorphisms: Vec::new(),
        neighbor_orders: (0..n)
            .map(|i| {
                mol.neighbors(i)
                    .iter()
                    .map(|&(j, b)| (j, mol.bond(b).order.index() as u32))
                    .collect()
            })
            .collect(),
    };
    let colors = initial_colors(&invariants);
    let mut path = Vec::new();
    search.explore(colors, &mut path);
    let (certificate, colors) = search.best.expect("search visits at least one leaf");
    Canonical {
        ranking: CanonicalRanking {
            rank: colors.into_iter().map(|c| c as usize).collect(),
        },
        certificate,
    }
}

fn atom_invariant(mol: &MolGraph, i: usize, labels: Labels, mark: u32) -> u64 {
    let atom = mol.atom(i);
    let hydrogens = match labels {
        Labels::Full => atom.hydrogens as u64,
        Labels::HeavyOnly => 0,
    };
    let mut key = atom.element as u64;
    key = key * 8 + (atom.charge as i64 + 4) as u64;
    key = key * 2 + atom.aromatic as u64;
    key = key * 64 + mol.degree(i).min(63) as u64;
    key = key * 16 + hydrogens.min(15);
    (key << 32) | mark as u64
}

fn initial_colors(invariants: &[u64]) -> Vec<u32> {
    let mut sorted = invariants.to_vec();
    sorted.sort_unstable();
    invariants
        .iter()
        .map(|v| sorted.partition_point(|x| x < v) as u32)
        .collect()
}

fn count_distinct(colors: &[u32]) -> usize {
    let mut seen = vec![false; colors.len()];
    colors.iter().filter(|&&c| !std::mem::replace(&mut seen[c as usize], true)).count()
}

struct Search<'a> {
    mol: &'a MolGraph,
    invariants: &'a [u64],
    neighbor_orders: Vec<Vec<(usize, u32)>>,
    best: Option<(Vec<u64>, Vec<u32>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    /// Refines an ordered coloring to its coarsest stable refinement.
    fn refine(&self, colors: &mut [u32]) {
        let n = colors.len();
        let mut classes = count_distinct(colors);
        let mut signatures: Vec<(u32, Vec<(u32, u32)>)> = vec![(0, Vec::new()); n];
        let mut index: Vec<usize> = (0..n).collect();
        while classes < n {
            for (i, sig) in signatures.iter_mut().enumerate() {
                sig.0 = colors[i];
                sig.1.clear();
                sig.1
                    .extend(self.neighbor_orders[i].iter().map(|&(j, o)| (colors[j], o)));
                sig.1.sort_unstable();
            }
            index.sort_unstable_by(|&a, &b| signatures[a].cmp(&signatures[b]));
            let mut distinct = 0;
            for p in 0..n {
                let atom = index[p];
                if p == 0 || signatures[index[p - 1]] != signatures[atom] {
                    distinct += 1;
                    colors[atom] = p as u32;
                } else {
                    colors[atom] = colors[index[p - 1]];
                }
            }
            if distinct == classes {
                break;
            }
            classes = distinct;
        }
    }

    fn certificate(&self, colors: &[u32]) -> Vec<u64> {
        let n = colors.len();
        let mut cert = vec![0u64; n + 1];
        cert[0] = n as u64;
        for (i, &c) in colors.iter().enumerate() {
            cert[c as usize + 1] = self.invariants[i];
        }
        let mut edges: Vec<u64> = self
            .mol
            .bonds()
            .iter()
            .map(|b| {
                let (x, y) = (colors[b.a] as u64, colors[b.b] as u64);
                let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                (lo << 34) | (hi << 4) | b.order.index() as u64
            })
            .collect();
        edges.sort_unstable();
        cert.extend(edges);
        cert
    }

    fn explore(&mut self, mut colors: Vec<u32>, path: &mut Vec<usize>) {
        self.refine(&mut colors);
        let n = colors.len();
        // first non-singleton cell: smallest color shared by several atoms
        let mut size = vec![0usize; n];
        for &c in &colors {
            size[c as usize] += 1;
        }
        let Some(cell) = (0..n).find(|&c| size[c] > 1) else {
            self.leaf(colors);
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&i| colors[i] as usize == cell).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &members {
            if !explored.is_empty() && self.equivalent_to_explored(v, &explored, path) {
                continue;
            }
            let mut child = colors.clone();
            for &w in &members {
                if w != v {
                    child[w] = cell as u32 + 1;
                }
            }
            path.push(v);
            self.explore(child, path);
            path.pop();
            explored.push(v);
        }
    }

    fn leaf(&mut self, colors: Vec<u32>) {
        let cert = self.certificate(&colors);
        match &self.best {
            None => self.best = Some((cert, colors)),
            Some((best, best_colors)) => match cert.cmp(best) {
                std::cmp::Ordering::Less => self.best = Some((cert, colors)),
                std::cmp::Ordering::Equal => {
                    let mut at_rank = vec![0; colors.len()];
                    for (i, &c) in best_colors.iter().enumerate() {
                        at_rank[c as usize] = i;
                    }
                    let gamma: Vec<usize> = colors.iter().map(|&c| at_rank[c as usize]).collect();
                    if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                        self.automorphisms.push(gamma);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    }

    /// Whether `v` shares an orbit with an explored sibling under the
    /// automorphisms found so far that fix the current path pointwise.
    fn equivalent_to_explored(&self, v: usize, explored: &[usize], path: &[usize]) -> bool {
        let n = self.invariants.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for gamma in &self.automorphisms {
            if path.iter().any(|&p| gamma[p] != p) {
                continue;
            }
            any = true;
            for (i, &g) in gamma.iter().enumerate() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, g));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let root = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::smiles::parse_smiles;

    fn ranked_bonds(mol: &MolGraph, rank: &[usize]) -> Vec<(usize, usize, usize)> {
        let mut v: Vec<_> = mol
            .bonds()
            .iter()
            .map(|b| {
                let (x, y) = (rank[b.a], rank[b.b]);
                (x.min(y), x.max(y), b.order.index())
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn single_atom() {
        let m = parse_smiles("C").unwrap();
        assert_eq!(canonical_rank(&m).rank, vec![0]);
    }

    #[test]
    fn ethanol_permutations_agree() {
        let m = parse_smiles("CCO").unwrap();
        let reference = canonicalize(&m, Labels::Full, None);
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for p in perms {
            let q = m.permuted(&p);
            let c = canonicalize(&q, Labels::Full, None);
            assert_eq!(c.certificate, reference.certificate);
            assert_eq!(
                ranked_bonds(&q, &c.ranking.rank),
                ranked_bonds(&m, &reference.ranking.rank)
            );
        }
    }

    #[test]
    fn benzene_ranks_are_distinct() {
        let m = parse_smiles("c1ccccc1").unwrap();
        let mut r = canonical_rank(&m).rank;
        r.sort();
        assert_eq!(r, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn certificates_separate_non_isomorphic() {
        let a = canonicalize(&parse_smiles("CCC(C)C").unwrap(), Labels::Full, None);
        let b = canonicalize(&parse_smiles("CCCCC").unwrap(), Labels::Full, None);
        assert_ne!(a.certificate, b.certificate);
        let c = canonicalize(&parse_smiles("C(C)(C)CC").unwrap(), Labels::Full, None);
        assert_eq!(a.certificate, c.certificate);
    }

    #[test]
    fn heavy_only_ignores_hydrogens() {
        let a = parse_smiles("*CC*").unwrap();
        let b = parse_smiles("CC").unwrap();
        let sub = a.induced_subgraph(&[1, 2]);
        assert_ne!(
            canonicalize(&sub, Labels::Full, None).certificate,
            canonicalize(&b, Labels::Full, None).certificate
        );
        assert_eq!(
            canonicalize(&sub, Labels::HeavyOnly, None).certificate,
            canonicalize(&b, Labels::HeavyOnly, None).certificate
        );
    }

    #[test]
    fn marks_distinguish_symmetric_sites() {
        // para-disubstituted ring: the two sites are equivalent
        let m = parse_smiles("*c1ccc(*)cc1").unwrap();
        let stars: Vec<usize> = m.connection_sites().collect();
        let cert = |s: usize| {
            let marks: Vec<u32> = (0..m.num_atoms()).map(|i| (i == s) as u32).collect();
            canonicalize(&m, Labels::Full, Some(&marks)).certificate
        };
        assert_eq!(cert(stars[0]), cert(stars[1]));
        // methyl next to one site only: not equivalent
        let m2 = parse_smiles("*c1ccc(*)c(C)c1").unwrap();
        let stars: Vec<usize> = m2.connection_sites().collect();
        let cert2 = |s: usize| {
            let marks: Vec<u32> = (0..m2.num_atoms()).map(|i| (i == s) as u32).collect();
            canonicalize(&m2, Labels::Full, Some(&marks)).certificate
        };
        assert_ne!(cert2(stars[0]), cert2(stars[1]));
    }

    #[test]
    fn highly_symmetric_graphs_finish() {
        // cubane-like carbon cage and a large symmetric tree
        let m = parse_smiles("C12C3C4C1C5C2C3C45").unwrap();
        assert_eq!(canonical_rank(&m).rank.len(), 8);
        let m = parse_smiles("CC(C)(C)C(C(C)(C)C)(C(C)(C)C)C(C)(C)C").unwrap();
        let r = canonical_rank(&m).rank;
        let mut s = r.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), r.len());
    }
}
