//! Shared test helpers: random molecule generation and brute-force oracles
//! that do not rely on the library's canonicalizer.
#![allow(dead_code)]

use std::collections::BTreeSet;

use graphbpe::chem::{parse_smiles, valence_check, Atom, BondOrder, Element, MolGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIXTURE_1K: &str = include_str!("../data/fixture_1k.smi");
pub const FIXTURE_2K: &str = include_str!("../data/fixture_2k.smi");

pub fn fixture_smiles(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').next().unwrap().to_string())
        .collect()
}

pub fn fixture_mols(text: &str) -> Vec<MolGraph> {
    fixture_smiles(text)
        .iter()
        .map(|s| parse_smiles(s).unwrap_or_else(|e| panic!("{s}: {e}")))
        .collect()
}

const RING_SEEDS: [&str; 5] = ["c1ccccc1", "c1ccncc1", "c1ccoc1", "C1CC1", "C1CCNC1"];
const ELEMENTS: [(Element, u32); 7] = [
    (Element::C, 4),
    (Element::C, 4),
    (Element::C, 4),
    (Element::N, 3),
    (Element::O, 2),
    (Element::S, 2),
    (Element::Cl, 1),
];

fn free_valence(mol: &MolGraph, i: usize) -> u32 {
    let atom = mol.atom(i);
    if atom.aromatic {
        // only a ring carbon bearing hydrogen takes a substituent
        return (atom.element == Element::C && atom.hydrogens > 0) as u32;
    }
    let max = *atom.element.allowed_valences(atom.charge).first().unwrap_or(&0) as u32;
    max.saturating_sub(mol.bond_order_sum_twice(i) / 2)
}

fn refresh_hydrogens(mol: &mut MolGraph) {
    for i in 0..mol.num_atoms() {
        let h = graphbpe::chem::valence::default_hydrogens(mol, i);
        mol.atom_mut(i).hydrogens = h;
    }
}

/// A random connected, valence-valid molecule with at most `max_atoms`
/// atoms (and at least one).
pub fn random_molecule(rng: &mut impl Rng, max_atoms: usize) -> MolGraph {
    loop {
        let mut mol = if max_atoms >= 6 && rng.gen_bool(0.3) {
            parse_smiles(RING_SEEDS.choose(rng).unwrap()).unwrap()
        } else {
            let (e, _) = *ELEMENTS.choose(rng).unwrap();
            let mut m = MolGraph::new();
            m.add_atom(Atom::new(e));
            m
        };
        refresh_hydrogens(&mut mol);
        let target = rng.gen_range(mol.num_atoms()..=max_atoms.max(mol.num_atoms()));
        while mol.num_atoms() < target {
            let open: Vec<usize> = (0..mol.num_atoms()).filter(|&i| free_valence(&mol, i) > 0).collect();
            let Some(&anchor) = open.choose(rng) else { break };
            let (e, max) = *ELEMENTS.choose(rng).unwrap();
            let limit = free_valence(&mol, anchor).min(max).min(3);
            let order = match rng.gen_range(0..10) {
                0 if limit >= 3 => BondOrder::Triple,
                1 | 2 if limit >= 2 => BondOrder::Double,
                _ => BondOrder::Single,
            };
            let new = mol.add_atom(Atom::new(e));
            mol.add_bond(anchor, new, order).unwrap();
            refresh_hydrogens(&mut mol);
        }
        // occasional extra ring bond between aliphatic atoms
        if mol.num_atoms() >= 4 && rng.gen_bool(0.3) {
            let open: Vec<usize> = (0..mol.num_atoms())
                .filter(|&i| !mol.atom(i).aromatic && free_valence(&mol, i) > 0)
                .collect();
            if open.len() >= 2 {
                let a = *open.choose(rng).unwrap();
                let b = *open.choose(rng).unwrap();
                if a != b && mol.bond_between(a, b).is_none() {
                    mol.add_bond(a, b, BondOrder::Single).unwrap();
                    refresh_hydrogens(&mut mol);
                }
            }
        }
        if valence_check(&mol) {
            return mol;
        }
    }
}

pub fn random_corpus(seed: u64, max_mols: usize, max_atoms: usize) -> Vec<MolGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_mols);
    (0..n).map(|_| random_molecule(&mut rng, max_atoms)).collect()
}

/// Brute-force isomorphism test by backtracking over atom assignments.
/// Compares element, charge, aromatic flag, optionally hydrogens, and bond
/// orders.
pub fn isomorphic(a: &MolGraph, b: &MolGraph, with_hydrogens: bool) -> bool {
    if a.num_atoms() != b.num_atoms() || a.num_bonds() != b.num_bonds() {
        return false;
    }
    let label = |m: &MolGraph, i: usize| {
        let at = m.atom(i);
        (
            at.element,
            at.charge,
            at.aromatic,
            if with_hydrogens { at.hydrogens } else { 0 },
            m.degree(i),
        )
    };
    let mut la: Vec<_> = (0..a.num_atoms()).map(|i| label(a, i)).collect();
    let mut lb: Vec<_> = (0..b.num_atoms()).map(|i| label(b, i)).collect();
    la.sort();
    lb.sort();
    if la != lb {
        return false;
    }
    let n = a.num_atoms();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        a: &MolGraph,
        b: &MolGraph,
        i: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        label: &dyn Fn(&MolGraph, usize) -> (Element, i8, bool, u8, usize),
    ) -> bool {
        if i == a.num_atoms() {
            return true;
        }
        for j in 0..b.num_atoms() {
            if used[j] || label(a, i) != label(b, j) {
                continue;
            }
            let consistent = (0..i).all(|k| {
                let ea = a.bond_between(i, k).map(|x| a.bond(x).order);
                let eb = b.bond_between(j, map[k]).map(|x| b.bond(x).order);
                ea == eb
            });
            if !consistent {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if extend(a, b, i + 1, map, used, label) {
                return true;
            }
            used[j] = false;
        }
        map[i] = usize::MAX;
        false
    }
    extend(a, b, 0, &mut map, &mut used, &label)
}

/// Bonds on at least one simple cycle, by enumerating simple paths.
pub fn ring_bonds_brute_force(mol: &MolGraph) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for (id, bond) in mol.bonds().iter().enumerate() {
        // a bond is on a cycle iff its endpoints are joined by a simple path
        // avoiding it
        let mut visited = vec![false; mol.num_atoms()];
        fn dfs(mol: &MolGraph, u: usize, target: usize, skip: usize, visited: &mut Vec<bool>) -> bool {
            if u == target {
                return true;
            }
            visited[u] = true;
            for &(v, b) in mol.neighbors(u) {
                if b != skip && !visited[v] && dfs(mol, v, target, skip, visited) {
                    return true;
                }
            }
            false
        }
        if dfs(mol, bond.a, bond.b, id, &mut visited) {
            out.insert(id);
        }
    }
    out
}

/// An arbitrary labeled graph (not necessarily chemically valid).
pub fn random_labeled_graph(rng: &mut impl Rng, max_atoms: usize) -> MolGraph {
    let n = rng.gen_range(1..=max_atoms);
    let mut mol = MolGraph::new();
    let elements = [Element::C, Element::N, Element::O, Element::Star];
    for _ in 0..n {
        let mut atom = Atom::new(*elements.choose(rng).unwrap());
        atom.aromatic = rng.gen_bool(0.2);
        atom.hydrogens = rng.gen_range(0..3);
        atom.charge = rng.gen_range(-1..=1);
        mol.add_atom(atom);
    }
    let density = rng.gen_range(0.1..0.6);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                let order = *BondOrder::ALL.choose(rng).unwrap();
                mol.add_bond(a, b, order).unwrap();
            }
        }
    }
    mol
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
