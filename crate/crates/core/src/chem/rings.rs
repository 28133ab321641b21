use std::collections::BTreeSet;

use super::mol::MolGraph;

/// Bonds lying on at least one cycle, i.e. every bond that is not a bridge.
pub fn ring_bonds(mol: &MolGraph) -> BTreeSet<usize> {
    ring_bond_mask(mol)
        .into_iter()
        .enumerate()
        .filter(|&(_, on_ring)| on_ring)
        .map(|(i, _)| i)
        .collect()
}

/// Per-bond ring membership via an iterative bridge search.
pub fn ring_bond_mask(mol: &MolGraph) -> Vec<bool> {
    let n = mol.num_atoms();
    let mut on_ring = vec![true; mol.num_bonds()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    // (atom, bond used to enter it, next neighbor position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (u, parent_bond, ref mut pos)) = stack.last_mut() {
            if let Some(&(v, bond)) = mol.neighbors(u).get(*pos) {
                *pos += 1;
                if bond == parent_bond {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, bond, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        on_ring[parent_bond] = false;
                    }
                }
            }
        }
    }
    on_ring
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::smiles::parse_smiles;

    #[test]
    fn chain_has_no_ring_bonds() {
        let m = parse_smiles("CCCCO").unwrap();
        assert!(ring_bonds(&m).is_empty());
    }

    #[test]
    fn benzene_all_bonds() {
        let m = parse_smiles("c1ccccc1").unwrap();
        assert_eq!(ring_bonds(&m).len(), 6);
    }

    #[test]
    fn substituent_bond_is_a_bridge() {
        let m = parse_smiles("Brc1ccccc1").unwrap();
        let rings = ring_bonds(&m);
        assert_eq!(rings.len(), 6);
        let br_bond = m.neighbors(0)[0].1;
        assert!(!rings.contains(&br_bond));
    }

    #[test]
    fn fused_rings_include_shared_edge() {
        let m = parse_smiles("c1ccc2ccccc2c1").unwrap();
        assert_eq!(ring_bonds(&m).len(), 11);
        // two rings joined by a chain: the linker bonds are bridges
        let m = parse_smiles("C1CC1CCC1CC1").unwrap();
        assert_eq!(ring_bonds(&m).len(), 6);
    }
}
