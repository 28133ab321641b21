//! SMILES subset reader.
//!
//! Supported: organic-subset atoms (`B C N O P S F Cl Br I`), their aromatic
//! forms (`b c n o p s`), `*` connection sites, bracket atoms with an
//! optional hydrogen count and a formal charge in -2..=2, bonds `- = # :`,
//! branches and ring closures (`1`..`9`, `%nn`). Stereo marks, isotopes,
//! atom classes and multi-component `.` input are rejected.

use std::collections::HashMap;

use thiserror::Error;

use super::element::Element;
use super::mol::{Atom, BondOrder, GraphError, MolGraph};
use super::rings::ring_bond_mask;
use super::valence::{default_hydrogens, first_valence_violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesErrorKind {
    #[error("empty input")]
    Empty,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unsupported element {0:?}")]
    UnsupportedElement(String),
    #[error("unsupported feature: {0}")]
    Unsupported(&'static str),
    #[error("unclosed bracket atom")]
    UnclosedBracket,
    #[error("unclosed branch")]
    UnclosedBranch,
    #[error("branch closed without being opened")]
    UnmatchedBranchClose,
    #[error("ring closure {0} is never closed")]
    UnmatchedRingClosure(u32),
    #[error("ring closure {0} has conflicting bond symbols")]
    RingBondMismatch(u32),
    #[error("bond symbol not followed by an atom")]
    DanglingBond,
    #[error("bond or branch without a preceding atom")]
    MissingAtom,
    #[error("formal charge out of range")]
    ChargeOutOfRange,
    #[error("invalid bond: {0}")]
    InvalidBond(GraphError),
    #[error("valence violation at atom {atom}")]
    ValenceViolation { atom: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("SMILES error at position {position}: {kind}")]
pub struct SmilesError {
    pub position: usize,
    pub kind: SmilesErrorKind,
}

impl SmilesError {
    fn new(position: usize, kind: SmilesErrorKind) -> Self {
        SmilesError { position, kind }
    }
}

/// Parses a SMILES string and checks valences.
pub fn parse_smiles(text: &str) -> Result<MolGraph, SmilesError> {
    let parsed = Parser::new(text).parse()?;
    if let Some(atom) = first_valence_violation(&parsed.mol) {
        return Err(SmilesError::new(
            parsed.positions[atom],
            SmilesErrorKind::ValenceViolation { atom },
        ));
    }
    Ok(parsed.mol)
}

/// Parses without the final valence check. Syntax errors are still reported.
pub fn parse_smiles_unchecked(text: &str) -> Result<MolGraph, SmilesError> {
    Parser::new(text).parse().map(|p| p.mol)
}

struct Parsed {
    mol: MolGraph,
    positions: Vec<usize>,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    mol: MolGraph,
    positions: Vec<usize>,
    bracketed: Vec<bool>,
    implicit_bonds: Vec<bool>,
    rings: HashMap<u32, (usize, Option<BondOrder>, usize)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            mol: MolGraph::new(),
            positions: Vec::new(),
            bracketed: Vec::new(),
            implicit_bonds: Vec::new(),
            rings: HashMap::new(),
        }
    }

    fn err<T>(&self, kind: SmilesErrorKind) -> Result<T, SmilesError> {
        Err(SmilesError::new(self.pos, kind))
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Parsed, SmilesError> {
        if self.bytes.is_empty() {
            return self.err(SmilesErrorKind::Empty);
        }
        let mut prev: Option<usize> = None;
        let mut pending: Option<(BondOrder, usize)> = None;
        let mut branches: Vec<(usize, usize)> = Vec::new();

        while let Some(c) = self.peek() {
            match c {
                b'(' => {
                    let Some(p) = prev else {
                        return self.err(SmilesErrorKind::MissingAtom);
                    };
                    if pending.is_some() {
                        return self.err(SmilesErrorKind::DanglingBond);
                    }
                    branches.push((p, self.pos));
                    self.pos += 1;
                }
                b')' => {
                    if pending.is_some() {
                        return self.err(SmilesErrorKind::DanglingBond);
                    }
                    let Some((p, _)) = branches.pop() else {
                        return self.err(SmilesErrorKind::UnmatchedBranchClose);
                    };
                    prev = Some(p);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' => {
                    if prev.is_none() {
                        return self.err(SmilesErrorKind::MissingAtom);
                    }
                    if pending.is_some() {
                        return self.err(SmilesErrorKind::UnexpectedChar(c as char));
                    }
                    let order = BondOrder::from_symbol(c as char).expect("bond symbol");
                    pending = Some((order, self.pos));
                    self.pos += 1;
                }
                b'/' | b'\\' => return self.err(SmilesErrorKind::Unsupported("directional bonds")),
                b'.' => return self.err(SmilesErrorKind::Unsupported("multi-component input")),
                b'$' => return self.err(SmilesErrorKind::Unsupported("quadruple bonds")),
                b'0'..=b'9' | b'%' => {
                    let Some(p) = prev else {
                        return self.err(SmilesErrorKind::MissingAtom);
                    };
                    let start = self.pos;
                    let number = self.ring_number()?;
                    let explicit = pending.take().map(|(o, _)| o);
                    self.ring_closure(p, number, explicit, start)?;
                }
                _ => {
                    let start = self.pos;
                    let (atom, bracketed) = self.atom()?;
                    let id = self.mol.add_atom(atom);
                    self.positions.push(start);
                    self.bracketed.push(bracketed);
                    if let Some(p) = prev {
                        let explicit = pending.take().map(|(o, _)| o);
                        self.bond(p, id, explicit, start)?;
                    } else if pending.is_some() {
                        return self.err(SmilesErrorKind::MissingAtom);
                    }
                    prev = Some(id);
                }
            }
        }

        if let Some((_, at)) = pending {
            return Err(SmilesError::new(at, SmilesErrorKind::DanglingBond));
        }
        if let Some(&(_, at)) = branches.last() {
            return Err(SmilesError::new(at, SmilesErrorKind::UnclosedBranch));
        }
        if let Some((&number, &(_, _, at))) = self.rings.iter().min_by_key(|(_, v)| v.2) {
            return Err(SmilesError::new(at, SmilesErrorKind::UnmatchedRingClosure(number)));
        }
        if self.mol.is_empty() {
            return Err(SmilesError::new(0, SmilesErrorKind::Empty));
        }

        // An unmarked bond between two aromatic atoms is aromatic only if it
        // lies on a ring; otherwise it is the single bond joining two systems.
        let on_ring = ring_bond_mask(&self.mol);
        for b in 0..self.mol.num_bonds() {
            if self.implicit_bonds[b] && !on_ring[b] && self.mol.bond(b).order == BondOrder::Aromatic {
                self.mol.set_bond_order(b, BondOrder::Single);
            }
        }
        for i in 0..self.mol.num_atoms() {
            if !self.bracketed[i] {
                let h = default_hydrogens(&self.mol, i);
                self.mol.atom_mut(i).hydrogens = h;
            }
        }
        Ok(Parsed {
            mol: self.mol,
            positions: self.positions,
        })
    }

    fn default_order(&self, a: usize, b: usize) -> BondOrder {
        if self.mol.atom(a).aromatic && self.mol.atom(b).aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn bond(&mut self, a: usize, b: usize, explicit: Option<BondOrder>, at: usize) -> Result<(), SmilesError> {
        let order = explicit.unwrap_or_else(|| self.default_order(a, b));
        self.mol
            .add_bond(a, b, order)
            .map_err(|e| SmilesError::new(at, SmilesErrorKind::InvalidBond(e)))?;
        self.implicit_bonds.push(explicit.is_none());
        Ok(())
    }

    fn ring_number(&mut self) -> Result<u32, SmilesError> {
        let c = self.peek().ok_or(SmilesError::new(self.pos, SmilesErrorKind::UnexpectedEnd))?;
        if c == b'%' {
            let digits = self.bytes.get(self.pos + 1..self.pos + 3);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    Ok(((d[0] - b'0') * 10 + (d[1] - b'0')) as u32)
                }
                _ => self.err(SmilesErrorKind::UnexpectedChar('%')),
            }
        } else {
            self.pos += 1;
            Ok((c - b'0') as u32)
        }
    }

    fn ring_closure(
        &mut self,
        atom: usize,
        number: u32,
        explicit: Option<BondOrder>,
        at: usize,
    ) -> Result<(), SmilesError> {
        match self.rings.remove(&number) {
            Some((other, opened_with, _)) => {
                let order = match (opened_with, explicit) {
                    (Some(x), Some(y)) if x != y => {
                        return Err(SmilesError::new(at, SmilesErrorKind::RingBondMismatch(number)))
                    }
                    (Some(x), _) | (None, Some(x)) => Some(x),
                    (None, None) => None,
                };
                self.bond(other, atom, order, at)
            }
            None => {
                self.rings.insert(number, (atom, explicit, at));
                Ok(())
            }
        }
    }

    /// Returns the atom and whether it was written in brackets.
    fn atom(&mut self) -> Result<(Atom, bool), SmilesError> {
        let c = self.peek().expect("caller checked");
        if c == b'[' {
            return self.bracket_atom().map(|a| (a, true));
        }
        let rest = &self.bytes[self.pos..];
        let (atom, len) = match c {
            b'*' => (Atom::star(), 1),
            b'B' if rest.get(1) == Some(&b'r') => (Atom::new(Element::Br), 2),
            b'C' if rest.get(1) == Some(&b'l') => (Atom::new(Element::Cl), 2),
            b'B' => (Atom::new(Element::B), 1),
            b'C' => (Atom::new(Element::C), 1),
            b'N' => (Atom::new(Element::N), 1),
            b'O' => (Atom::new(Element::O), 1),
            b'P' => (Atom::new(Element::P), 1),
            b'S' => (Atom::new(Element::S), 1),
            b'F' => (Atom::new(Element::F), 1),
            b'I' => (Atom::new(Element::I), 1),
            b'b' => (Atom::aromatic(Element::B), 1),
            b'c' => (Atom::aromatic(Element::C), 1),
            b'n' => (Atom::aromatic(Element::N), 1),
            b'o' => (Atom::aromatic(Element::O), 1),
            b'p' => (Atom::aromatic(Element::P), 1),
            b's' => (Atom::aromatic(Element::S), 1),
            _ => return self.err(SmilesErrorKind::UnexpectedChar(c as char)),
        };
        self.pos += len;
        Ok((atom, false))
    }

    fn bracket_atom(&mut self) -> Result<Atom, SmilesError> {
        self.pos += 1; // '['
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return self.err(SmilesErrorKind::Unsupported("isotopes"));
        }
        let mut atom = self.bracket_symbol()?;
        if self.peek() == Some(b'@') {
            return self.err(SmilesErrorKind::Unsupported("chirality"));
        }
        if self.peek() == Some(b'H') {
            self.pos += 1;
            atom.hydrogens = match self.peek() {
                Some(d) if d.is_ascii_digit() => {
                    self.pos += 1;
                    d - b'0'
                }
                _ => 1,
            };
        }
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let unit: i32 = if sign == b'+' { 1 } else { -1 };
            let mut magnitude = 1i32;
            match self.peek() {
                Some(d) if d.is_ascii_digit() => {
                    magnitude = (d - b'0') as i32;
                    self.pos += 1;
                }
                _ => {
                    while self.peek() == Some(sign) {
                        magnitude += 1;
                        self.pos += 1;
                    }
                }
            }
            let charge = unit * magnitude;
            if !(-2..=2).contains(&charge) {
                return self.err(SmilesErrorKind::ChargeOutOfRange);
            }
            atom.charge = charge as i8;
        }
        match self.peek() {
            Some(b']') => {
                self.pos += 1;
                Ok(atom)
            }
            Some(b':') => self.err(SmilesErrorKind::Unsupported("atom classes")),
            Some(c) => self.err(SmilesErrorKind::UnexpectedChar(c as char)),
            None => self.err(SmilesErrorKind::UnclosedBracket),
        }
    }

    fn bracket_symbol(&mut self) -> Result<Atom, SmilesError> {
        let start = self.pos;
        let Some(c) = self.peek() else {
            return self.err(SmilesErrorKind::UnclosedBracket);
        };
        if c == b'*' {
            self.pos += 1;
            return Ok(Atom::star());
        }
        if c.is_ascii_lowercase() {
            self.pos += 1;
            let symbol = (c as char).to_ascii_uppercase().to_string();
            return match Element::from_symbol(&symbol) {
                Some(e) if e.can_be_aromatic() => Ok(Atom::aromatic(e)),
                _ => Err(SmilesError::new(start, SmilesErrorKind::UnsupportedElement((c as char).to_string()))),
            };
        }
        if !c.is_ascii_uppercase() {
            return self.err(SmilesErrorKind::UnexpectedChar(c as char));
        }
        // Two-letter symbols take precedence; `H` after an element is a count.
        let mut len = 1;
        if let Some(&next) = self.bytes.get(self.pos + 1) {
            if next.is_ascii_lowercase() {
                len = 2;
            }
        }
        let symbol = std::str::from_utf8(&self.bytes[self.pos..self.pos + len]).unwrap_or("?");
        match Element::from_symbol(symbol) {
            Some(e) if e != Element::Star => {
                self.pos += len;
                Ok(Atom::new(e))
            }
            _ => Err(SmilesError::new(start, SmilesErrorKind::UnsupportedElement(symbol.to_string()))),
        }
    }
}
