//! SMILES writer.
//!
//! Atoms are visited depth-first from rank 0, neighbors in rank order. Ring
//! closures take the lowest free digit (`%nn` above 9); a digit closed at
//! an atom is reused only by later atoms.

use super::canon::{canonicalize, Labels};
use super::mol::{BondOrder, MolGraph};
use super::rings::ring_bond_mask;
use super::valence::default_hydrogens;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// Parseable SMILES with brackets wherever hydrogens or charge differ
    /// from the defaults.
    Smiles,
    /// Hydrogen-free pattern string: aromatic bonds always spelled `:`,
    /// brackets only for charges.
    Pattern,
}

/// Canonical SMILES: isomorphic graphs give identical strings.
pub fn write_smiles(mol: &MolGraph) -> String {
    let canon = canonicalize(mol, Labels::Full, None);
    write_ranked(mol, &canon.ranking.rank, Style::Smiles)
}

/// Canonical hydrogen-free pattern string of a whole graph.
pub fn write_pattern(mol: &MolGraph) -> String {
    let canon = canonicalize(mol, Labels::HeavyOnly, None);
    write_ranked(mol, &canon.ranking.rank, Style::Pattern)
}

/// Writes `mol` traversing atoms in the order given by `rank`.
pub fn write_ranked(mol: &MolGraph, rank: &[usize], style: Style) -> String {
    Writer::new(mol, rank, style).write()
}

struct Writer<'a> {
    mol: &'a MolGraph,
    style: Style,
    on_ring: Vec<bool>,
    /// Neighbors sorted by rank, as (neighbor, bond).
    sorted: Vec<Vec<(usize, usize)>>,
    visit_pos: Vec<usize>,
    children: Vec<Vec<(usize, usize)>>,
    /// Ring bonds opened at an atom, as (partner, bond).
    openings: Vec<Vec<(usize, usize)>>,
    closings: Vec<Vec<(usize, usize)>>,
    digits: Vec<Option<usize>>,
    roots: Vec<usize>,
    out: String,
}

impl<'a> Writer<'a> {
    fn new(mol: &'a MolGraph, rank: &[usize], style: Style) -> Self {
        let n = mol.num_atoms();
        let sorted = (0..n)
            .map(|i| {
                let mut v = mol.neighbors(i).to_vec();
                v.sort_by_key(|&(j, _)| rank[j]);
                v
            })
            .collect();
        Writer {
            mol,
            style,
            on_ring: ring_bond_mask(mol),
            sorted,
            visit_pos: vec![usize::MAX; n],
            children: vec![Vec::new(); n],
            openings: vec![Vec::new(); n],
            closings: vec![Vec::new(); n],
            digits: vec![None; mol.num_bonds()],
            roots: Vec::new(),
            out: String::new(),
        }
        .with_roots(rank)
    }

    fn with_roots(mut self, rank: &[usize]) -> Self {
        let mut by_rank: Vec<usize> = (0..self.mol.num_atoms()).collect();
        by_rank.sort_by_key(|&i| rank[i]);
        self.roots = by_rank;
        self
    }

    fn write(mut self) -> String {
        let roots = std::mem::take(&mut self.roots);
        let mut counter = 0;
        let mut starts = Vec::new();
        for &r in &roots {
            if self.visit_pos[r] == usize::MAX {
                starts.push(r);
                self.scan(r, &mut counter);
            }
        }
        let mut in_use: Vec<bool> = Vec::new();
        for (k, &s) in starts.iter().enumerate() {
            if k > 0 {
                self.out.push('.');
            }
            self.emit(s, &mut in_use);
        }
        self.out
    }

    /// First pass: spanning tree and ring-closure bonds.
    fn scan(&mut self, root: usize, counter: &mut usize) {
        // iterative DFS: (atom, parent bond, next neighbor index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        self.visit_pos[root] = *counter;
        *counter += 1;
        while let Some(top) = stack.last_mut() {
            let (u, parent_bond, idx) = *top;
            if idx == self.sorted[u].len() {
                stack.pop();
                continue;
            }
            top.2 += 1;
            let (v, bond) = self.sorted[u][idx];
            if bond == parent_bond {
                continue;
            }
            if self.visit_pos[v] == usize::MAX {
                self.visit_pos[v] = *counter;
                *counter += 1;
                self.children[u].push((v, bond));
                stack.push((v, bond, 0));
            } else if self.visit_pos[v] < self.visit_pos[u]
                && !self.closings[u].iter().any(|&(_, b)| b == bond)
            {
                // back edge to an ancestor: opened at v, closed at u
                self.openings[v].push((u, bond));
                self.closings[u].push((v, bond));
            }
        }
        for list in self.openings.iter_mut().chain(self.closings.iter_mut()) {
            list.sort_by_key(|&(p, _)| self.visit_pos[p]);
        }
    }

    fn emit(&mut self, root: usize, in_use: &mut Vec<bool>) {
        enum Task {
            Atom(usize, Option<usize>),
            Text(&'static str),
        }
        let mut tasks = vec![Task::Atom(root, None)];
        while let Some(task) = tasks.pop() {
            let (u, via) = match task {
                Task::Text(t) => {
                    self.out.push_str(t);
                    continue;
                }
                Task::Atom(u, via) => (u, via),
            };
            if let Some(bond) = via {
                self.push_bond(bond);
            }
            self.push_atom(u);
            let mut freed = Vec::new();
            for &(_, bond) in &self.closings[u].clone() {
                let d = self.digits[bond].expect("ring opened before closing");
                self.push_bond(bond);
                self.push_digit(d);
                freed.push(d);
            }
            for &(_, bond) in &self.openings[u].clone() {
                let d = match in_use.iter().position(|&x| !x) {
                    Some(d) => d,
                    None => {
                        in_use.push(false);
                        in_use.len() - 1
                    }
                };
                in_use[d] = true;
                self.digits[bond] = Some(d);
                self.push_digit(d);
            }
            for d in freed {
                in_use[d] = false;
            }
            let children = &self.children[u];
            let last = children.len().saturating_sub(1);
            // pushed in reverse so they run in order
            for (k, &(v, bond)) in children.iter().enumerate().rev() {
                if k == last {
                    tasks.push(Task::Atom(v, Some(bond)));
                } else {
                    tasks.push(Task::Text(")"));
                    tasks.push(Task::Atom(v, Some(bond)));
                    tasks.push(Task::Text("("));
                }
            }
        }
    }

    fn push_digit(&mut self, d: usize) {
        let label = d + 1;
        if label < 10 {
            self.out.push(char::from(b'0' + label as u8));
        } else {
            self.out.push_str(&format!("%{label:02}"));
        }
    }

    fn push_bond(&mut self, bond: usize) {
        let b = self.mol.bond(bond);
        let both_aromatic = self.mol.atom(b.a).aromatic && self.mol.atom(b.b).aromatic;
        let symbol = match (b.order, self.style) {
            (BondOrder::Single, _) => both_aromatic.then_some('-'),
            (BondOrder::Double, _) => Some('='),
            (BondOrder::Triple, _) => Some('#'),
            (BondOrder::Aromatic, Style::Pattern) => Some(':'),
            (BondOrder::Aromatic, Style::Smiles) => {
                (!(both_aromatic && self.on_ring[bond])).then_some(':')
            }
        };
        if let Some(c) = symbol {
            self.out.push(c);
        }
    }

    fn push_atom(&mut self, i: usize) {
        let atom = self.mol.atom(i);
        let symbol = if atom.aromatic {
            atom.element.aromatic_symbol().unwrap_or(atom.element.symbol())
        } else {
            atom.element.symbol()
        };
        let hydrogens = match self.style {
            Style::Smiles if atom.hydrogens != default_hydrogens(self.mol, i) => Some(atom.hydrogens),
            _ => None,
        };
        if atom.charge == 0 && hydrogens.is_none() {
            self.out.push_str(symbol);
            return;
        }
        self.out.push('[');
        self.out.push_str(symbol);
        match hydrogens {
            Some(1) => self.out.push('H'),
            Some(h) if h > 1 => self.out.push_str(&format!("H{h}")),
            _ => {}
        }
        match atom.charge {
            0 => {}
            1 => self.out.push('+'),
            -1 => self.out.push('-'),
            c if c > 0 => self.out.push_str(&format!("+{c}")),
            c => self.out.push_str(&format!("-{}", -c)),
        }
        self.out.push(']');
    }
}
