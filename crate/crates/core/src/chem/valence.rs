//! Valence rules.
//!
//! Aromatic flags and aromatic bonds are kept as written, never kekulized. An
//! aromatic bond counts 1.5 toward an atom's order sum; the rounded-half-up
//! sum of an aromatic atom must reach one of its allowed valences and may
//! exceed it by at most one. A local rule cannot tell benzene from an
//! all-aromatic eight-membered ring, so every closed aromatic system (one
//! with no open aromatic connection site) is also required to lie on rings,
//! to have a Kekulé assignment, and to carry 4n+2 pi electrons.

use std::collections::BTreeSet;

use super::element::Element;
use super::mol::{BondOrder, MolGraph};
use super::rings::ring_bond_mask;

/// Hydrogens implied for an unbracketed atom in its current bonding.
///
/// Aliphatic atoms fill up to the smallest allowed valence not below their
/// order sum. Aromatic atoms count each aromatic bond once plus one shared
/// double bond, and fill up to their lowest allowed valence.
pub fn default_hydrogens(mol: &MolGraph, i: usize) -> u8 {
    let atom = mol.atom(i);
    if atom.is_connection_site() {
        return 0;
    }
    let allowed = atom.element.allowed_valences(atom.charge);
    if atom.aromatic {
        let base: u32 = mol
            .neighbors(i)
            .iter()
            .map(|&(_, b)| mol.bond(b).order.integral())
            .sum::<u32>()
            + 1;
        allowed
            .first()
            .map_or(0, |&v| (v as u32).saturating_sub(base) as u8)
    } else {
        let sum = mol.bond_order_sum_twice(i).div_ceil(2);
        allowed
            .iter()
            .find(|&&v| v as u32 >= sum)
            .map_or(0, |&v| (v as u32 - sum) as u8)
    }
}

/// Per-atom check: structural invariants of the atom and its bonds plus the
/// valence table (with the aromatic rounding rule).
pub fn atom_valence_ok(mol: &MolGraph, i: usize) -> bool {
    let atom = mol.atom(i);
    if atom.charge < -2 || atom.charge > 2 {
        return false;
    }
    if atom.is_connection_site() {
        return mol.degree(i) == 1 && atom.charge == 0 && atom.hydrogens == 0 && !atom.aromatic;
    }
    if atom.aromatic && !atom.element.can_be_aromatic() {
        return false;
    }
    // aromatic bonds join aromatic atoms, or an aromatic atom and a site
    for &(j, b) in mol.neighbors(i) {
        if mol.bond(b).order == BondOrder::Aromatic {
            let other = mol.atom(j);
            if !atom.aromatic || !(other.aromatic || other.is_connection_site()) {
                return false;
            }
        }
    }
    let allowed = atom.element.allowed_valences(atom.charge);
    let twice = mol.bond_order_sum_twice(i) + 2 * atom.hydrogens as u32;
    if atom.aromatic {
        let rounded = twice.div_ceil(2);
        allowed
            .iter()
            .any(|&v| (v as u32) <= rounded && rounded <= v as u32 + 1)
    } else {
        twice % 2 == 0 && allowed.contains(&((twice / 2) as u8))
    }
}

/// Connected set of aromatic atoms joined by aromatic bonds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AromaticSystem {
    pub atoms: Vec<usize>,
    pub bonds: Vec<usize>,
    /// True when some member carries an aromatic bond to a connection site,
    /// i.e. the system may still be completed by generation.
    pub open: bool,
}

pub fn aromatic_systems(mol: &MolGraph) -> Vec<AromaticSystem> {
    let n = mol.num_atoms();
    let mut seen = vec![false; n];
    let mut systems = Vec::new();
    for start in 0..n {
        let a = mol.atom(start);
        if seen[start] || !a.aromatic || a.is_connection_site() {
            continue;
        }
        let mut atoms = Vec::new();
        let mut bonds = BTreeSet::new();
        let mut open = false;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            atoms.push(u);
            for &(v, b) in mol.neighbors(u) {
                if mol.bond(b).order != BondOrder::Aromatic {
                    continue;
                }
                let other = mol.atom(v);
                if other.is_connection_site() {
                    open = true;
                    continue;
                }
                bonds.insert(b);
                if !seen[v] && other.aromatic {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        atoms.sort_unstable();
        systems.push(AromaticSystem {
            atoms,
            bonds: bonds.into_iter().collect(),
            open,
        });
    }
    systems
}

/// Pi electrons an aromatic atom contributes, or `None` when it cannot take
/// part in an aromatic system at all. `Some((electrons, needs_double))`.
fn pi_contribution(mol: &MolGraph, i: usize) -> Option<(u32, bool)> {
    let atom = mol.atom(i);
    let base: u32 = mol
        .neighbors(i)
        .iter()
        .map(|&(_, b)| mol.bond(b).order.integral())
        .sum::<u32>()
        + atom.hydrogens as u32;
    let v = *atom
        .element
        .allowed_valences(atom.charge)
        .iter()
        .find(|&&v| v as u32 >= base)? as u32;
    match v - base {
        1 => Some((1, true)),
        0 => {
            let donor = match (atom.element, atom.charge) {
                (Element::N | Element::P | Element::O | Element::S, 0) => true,
                (Element::C | Element::N, -1) => true,
                _ => false,
            };
            Some((if donor { 2 } else { 0 }, false))
        }
        _ => None,
    }
}

/// Whether a closed aromatic system is chemically consistent.
pub fn aromatic_system_ok(mol: &MolGraph, system: &AromaticSystem, on_ring: &[bool]) -> bool {
    if system.bonds.iter().any(|&b| !on_ring[b]) {
        return false;
    }
    let mut electrons = 0;
    let mut needy = Vec::new();
    for &a in &system.atoms {
        if mol.aromatic_bond_count(a) == 0 {
            return false;
        }
        match pi_contribution(mol, a) {
            Some((e, need)) => {
                electrons += e;
                if need {
                    needy.push(a);
                }
            }
            None => return false,
        }
    }
    electrons % 4 == 2 && has_kekule_matching(mol, system, &needy)
}

/// Perfect matching of the atoms that need a double bond, using aromatic
/// bonds of the system. Systems are small, so plain backtracking is enough.
fn has_kekule_matching(mol: &MolGraph, system: &AromaticSystem, needy: &[usize]) -> bool {
    if needy.len() % 2 == 1 {
        return false;
    }
    let in_system: BTreeSet<usize> = system.bonds.iter().copied().collect();
    let mut needs = vec![false; mol.num_atoms()];
    for &a in needy {
        needs[a] = true;
    }

    fn search(
        mol: &MolGraph,
        in_system: &BTreeSet<usize>,
        needs: &mut [bool],
        order: &[usize],
        pos: usize,
    ) -> bool {
        let Some(offset) = order[pos..].iter().position(|&a| needs[a]) else {
            return true;
        };
        let u = order[pos + offset];
        needs[u] = false;
        for &(v, b) in mol.neighbors(u) {
            if needs[v] && in_system.contains(&b) {
                needs[v] = false;
                if search(mol, in_system, needs, order, pos + offset + 1) {
                    return true;
                }
                needs[v] = true;
            }
        }
        needs[u] = true;
        false
    }

    search(mol, &in_system, &mut needs, needy, 0)
}

/// True iff every atom satisfies the valence table and every closed aromatic
/// system is consistent.
pub fn valence_check(mol: &MolGraph) -> bool {
    first_valence_violation(mol).is_none()
}

/// Index of an offending atom, if any.
pub fn first_valence_violation(mol: &MolGraph) -> Option<usize> {
    if let Some(i) = (0..mol.num_atoms()).find(|&i| !atom_valence_ok(mol, i)) {
        return Some(i);
    }
    let systems = aromatic_systems(mol);
    if systems.iter().all(|s| s.open) {
        return None;
    }
    let on_ring = ring_bond_mask(mol);
    systems
        .iter()
        .filter(|s| !s.open)
        .find(|s| !aromatic_system_ok(mol, s, &on_ring))
        .map(|s| s.atoms[0])
}

/// Downgrades every closed aromatic system that fails the aromatic rule to
/// single bonds and aliphatic atoms, recomputing their hydrogens. Returns the
/// number of systems rewritten.
pub fn repair_aromaticity(mol: &mut MolGraph) -> usize {
    let systems = aromatic_systems(mol);
    let on_ring = ring_bond_mask(mol);
    let broken: Vec<AromaticSystem> = systems
        .into_iter()
        .filter(|s| !s.open && !aromatic_system_ok(mol, s, &on_ring))
        .collect();
    for system in &broken {
        for &b in &system.bonds {
            mol.set_bond_order(b, BondOrder::Single);
        }
        for &a in &system.atoms {
            mol.atom_mut(a).aromatic = false;
        }
        for &a in &system.atoms {
            let h = default_hydrogens(mol, a);
            mol.atom_mut(a).hydrogens = h;
        }
    }
    broken.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::mol::Atom;
    use crate::chem::smiles::{parse_smiles, parse_smiles_unchecked};

    #[test]
    fn methane_is_valid() {
        assert!(valence_check(&parse_smiles("C").unwrap()));
    }

    #[test]
    fn nitrogen_with_four_bonds_needs_a_charge() {
        let mut g = MolGraph::new();
        let n = g.add_atom(Atom::new(Element::N));
        for _ in 0..4 {
            let c = g.add_atom(Atom::new(Element::C).with_hydrogens(3));
            g.add_bond(n, c, BondOrder::Single).unwrap();
        }
        assert!(!valence_check(&g));
        g.atom_mut(n).charge = 1;
        assert!(valence_check(&g));
    }

    #[test]
    fn sulfur_with_two_triple_sites_passes() {
        // Chemically odd but allowed by the S valence set {2,4,6}.
        let g = parse_smiles("*#S#*").unwrap();
        assert!(valence_check(&g));
    }

    #[test]
    fn implicit_hydrogens_follow_smiles_convention() {
        let h = |s: &str| -> Vec<u8> {
            parse_smiles(s).unwrap().atoms().iter().map(|a| a.hydrogens).collect()
        };
        assert_eq!(h("CC"), vec![3, 3]);
        assert_eq!(h("C=O"), vec![2, 0]);
        assert_eq!(h("c1ccccc1"), vec![1; 6]);
        assert_eq!(h("c1ccncc1"), vec![1, 1, 1, 0, 1, 1]);
        assert_eq!(h("c1ccsc1"), vec![1, 1, 1, 0, 1]);
        assert_eq!(h("CS(=O)(=O)C"), vec![3, 0, 0, 0, 3]);
        assert_eq!(h("c1ccc2ccccc2c1")[3], 0);
        assert_eq!(h("*C"), vec![0, 3]);
    }

    #[test]
    fn heteroaromatics_are_accepted() {
        for s in [
            "c1ccccc1",
            "c1ccncc1",
            "c1cc[nH]c1",
            "c1ccoc1",
            "c1ccsc1",
            "c1ccc2ccccc2c1",
            "c1ccc2[nH]ccc2c1",
            "c1ccc2[nH]cnc2c1",
            "O=c1cccc[nH]1",
            "C[n+]1ccccc1",
            "c1cscn1",
            "c1ccc(-c2ccccc2)cc1",
        ] {
            let m = parse_smiles(s).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert!(valence_check(&m), "{s}");
        }
    }

    #[test]
    fn eight_membered_aromatic_ring_is_rejected_and_repaired() {
        assert!(parse_smiles("c1ccccccc1").is_err());
        let mut m = parse_smiles_unchecked("c1ccccccc1").unwrap();
        assert!(!valence_check(&m));
        assert_eq!(repair_aromaticity(&mut m), 1);
        assert!(valence_check(&m));
        assert!(m.atoms().iter().all(|a| !a.aromatic && a.hydrogens == 2));
    }

    #[test]
    fn odd_and_unmatched_systems_fail() {
        assert!(parse_smiles("c1cccc1").is_err());
        assert!(parse_smiles("c1ccnc1").is_err());
        assert!(parse_smiles("c").is_err());
    }

    #[test]
    fn open_systems_are_only_checked_locally() {
        let m = parse_smiles("*:c:c:c:c:*").unwrap();
        assert!(valence_check(&m));
        assert_eq!(aromatic_systems(&m).len(), 1);
        assert!(aromatic_systems(&m)[0].open);
    }

    #[test]
    fn benzene_repair_is_a_no_op() {
        let mut m = parse_smiles("c1ccccc1").unwrap();
        assert_eq!(repair_aromaticity(&mut m), 0);
    }
}
