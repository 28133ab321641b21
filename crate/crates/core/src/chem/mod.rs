//! Molecular graph model, SMILES reading and writing, valence rules and
//! canonical ranking.

pub mod canon;
pub mod element;
pub mod mol;
pub mod rings;
pub mod smiles;
pub mod valence;
pub mod writer;

pub use canon::{canonical_rank, canonicalize, Canonical, CanonicalRanking, Labels};
pub use element::Element;
pub use mol::{Atom, Bond, BondOrder, GraphError, MolGraph};
pub use rings::{ring_bond_mask, ring_bonds};
pub use smiles::{parse_smiles, parse_smiles_unchecked, SmilesError, SmilesErrorKind};
pub use valence::{repair_aromaticity, valence_check};
pub use writer::{write_pattern, write_ranked, write_smiles, Style};
