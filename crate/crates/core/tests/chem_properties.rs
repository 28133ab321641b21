mod common;

use common::*;
use graphbpe::chem::{
    canonicalize, parse_smiles, ring_bonds, valence_check, write_smiles, Labels, MolGraph,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ranked_adjacency(mol: &MolGraph, rank: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut edges: Vec<_> = mol
        .bonds()
        .iter()
        .map(|b| {
            let (x, y) = (rank[b.a], rank[b.b]);
            (x.min(y), x.max(y), b.order.index())
        })
        .collect();
    edges.sort();
    edges
}

fn ranked_labels(mol: &MolGraph, rank: &[usize]) -> Vec<(u8, i8, bool, u8)> {
    let mut out = vec![(0, 0, false, 0); mol.num_atoms()];
    for (i, &r) in rank.iter().enumerate() {
        let a = mol.atom(i);
        out[r] = (a.element as u8, a.charge, a.aromatic, a.hydrogens);
    }
    out
}

#[test]
fn fixture_corpora_parse_and_pass_valence_check() {
    for text in [FIXTURE_1K, FIXTURE_2K] {
        for mol in fixture_mols(text) {
            assert!(valence_check(&mol));
            assert!(mol.is_connected());
        }
    }
}

#[test]
fn fixture_roundtrip_is_a_fixed_point() {
    for s in fixture_smiles(FIXTURE_1K) {
        let mol = parse_smiles(&s).unwrap();
        let once = write_smiles(&mol);
        let reparsed = parse_smiles(&once).unwrap_or_else(|e| panic!("{s} -> {once}: {e}"));
        assert!(isomorphic(&mol, &reparsed, true), "{s} -> {once}");
        assert_eq!(write_smiles(&reparsed), once, "{s}");
    }
}

#[test]
fn fixture_canonical_form_ignores_atom_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in fixture_smiles(FIXTURE_1K).iter().take(300) {
        let mol = parse_smiles(s).unwrap();
        let p = random_permutation(&mut rng, mol.num_atoms());
        assert_eq!(write_smiles(&mol.permuted(&p)), write_smiles(&mol), "{s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn ranking_is_permutation_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mol = random_labeled_graph(&mut rng, 12);
        let perm = random_permutation(&mut rng, mol.num_atoms());
        let other = mol.permuted(&perm);
        let a = canonicalize(&mol, Labels::Full, None);
        let b = canonicalize(&other, Labels::Full, None);
        prop_assert_eq!(&a.certificate, &b.certificate);
        prop_assert_eq!(
            ranked_adjacency(&mol, &a.ranking.rank),
            ranked_adjacency(&other, &b.ranking.rank)
        );
        prop_assert_eq!(
            ranked_labels(&mol, &a.ranking.rank),
            ranked_labels(&other, &b.ranking.rank)
        );
        let mut sorted = a.ranking.rank.clone();
        sorted.sort();
        prop_assert_eq!(sorted, (0..mol.num_atoms()).collect::<Vec<_>>());
    }

    #[test]
    fn certificates_agree_with_brute_force_isomorphism(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_molecule(&mut rng, 8);
        let b = random_molecule(&mut rng, 8);
        let same = canonicalize(&a, Labels::Full, None).certificate
            == canonicalize(&b, Labels::Full, None).certificate;
        prop_assert_eq!(same, isomorphic(&a, &b, true));
    }

    #[test]
    fn random_molecules_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mol = random_molecule(&mut rng, 14);
        let s = write_smiles(&mol);
        let back = parse_smiles(&s);
        prop_assert!(back.is_ok(), "{} failed: {:?}", s, back.err());
        let back = back.unwrap();
        prop_assert!(isomorphic(&mol, &back, true), "{}", s);
        prop_assert_eq!(write_smiles(&back), s);
    }

    #[test]
    fn ring_bonds_match_cycle_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mol = random_labeled_graph(&mut rng, 8);
        prop_assert_eq!(ring_bonds(&mol), ring_bonds_brute_force(&mol));
    }

    #[test]
    fn parsed_molecules_pass_valence_check(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mol = random_molecule(&mut rng, 12);
        let parsed = parse_smiles(&write_smiles(&mol)).unwrap();
        prop_assert!(valence_check(&parsed));
    }
}
