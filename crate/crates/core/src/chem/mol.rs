use std::fmt;

use thiserror::Error;

use super::element::Element;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub const ALL: [BondOrder; 4] = [
        BondOrder::Single,
        BondOrder::Double,
        BondOrder::Triple,
        BondOrder::Aromatic,
    ];

    pub fn symbol(self) -> char {
        match self {
            BondOrder::Single => '-',
            BondOrder::Double => '=',
            BondOrder::Triple => '#',
            BondOrder::Aromatic => ':',
        }
    }

    pub fn from_symbol(c: char) -> Option<BondOrder> {
        match c {
            '-' => Some(BondOrder::Single),
            '=' => Some(BondOrder::Double),
            '#' => Some(BondOrder::Triple),
            ':' => Some(BondOrder::Aromatic),
            _ => None,
        }
    }

    /// Bond order doubled, so aromatic bonds (1.5) stay integral.
    pub fn twice(self) -> u32 {
        match self {
            BondOrder::Single => 2,
            BondOrder::Double => 4,
            BondOrder::Triple => 6,
            BondOrder::Aromatic => 3,
        }
    }

    /// Order as counted for Kekulé-style hydrogen assignment: aromatic counts 1.
    pub fn integral(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BondOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    pub charge: i8,
    pub aromatic: bool,
    /// Total attached hydrogens, whether written in brackets or implied.
    pub hydrogens: u8,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom {
            element,
            charge: 0,
            aromatic: false,
            hydrogens: 0,
        }
    }

    pub fn aromatic(element: Element) -> Self {
        Atom {
            aromatic: true,
            ..Atom::new(element)
        }
    }

    pub fn star() -> Self {
        Atom::new(Element::Star)
    }

    pub fn with_charge(mut self, charge: i8) -> Self {
        self.charge = charge;
        self
    }

    pub fn with_hydrogens(mut self, hydrogens: u8) -> Self {
        self.hydrogens = hydrogens;
        self
    }

    pub fn is_connection_site(&self) -> bool {
        self.element == Element::Star
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("atom {0} does not exist")]
    NoSuchAtom(usize),
    #[error("bond from atom {0} to itself")]
    SelfLoop(usize),
    #[error("atoms {0} and {1} are already bonded")]
    DuplicateBond(usize, usize),
}

/// An attributed molecular graph.
///
/// Atoms and bonds are addressed by index. The adjacency list stores
/// `(neighbor, bond index)` pairs in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MolGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MolGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_atom(&mut self, atom: Atom) -> usize {
        self.atoms.push(atom);
        self.adjacency.push(Vec::new());
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<usize, GraphError> {
        let n = self.atoms.len();
        if a >= n {
            return Err(GraphError::NoSuchAtom(a));
        }
        if b >= n {
            return Err(GraphError::NoSuchAtom(b));
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if self.bond_between(a, b).is_some() {
            return Err(GraphError::DuplicateBond(a, b));
        }
        let id = self.bonds.len();
        self.bonds.push(Bond { a, b, order });
        self.adjacency[a].push((b, id));
        self.adjacency[b].push((a, id));
        Ok(id)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn atom_mut(&mut self, i: usize) -> &mut Atom {
        &mut self.atoms[i]
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    pub fn set_bond_order(&mut self, i: usize, order: BondOrder) {
        self.bonds[i].order = order;
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `(neighbor, bond index)` pairs of an atom.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a]
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, bond)| bond)
    }

    /// Sum of doubled bond orders at an atom.
    pub fn bond_order_sum_twice(&self, i: usize) -> u32 {
        self.adjacency[i]
            .iter()
            .map(|&(_, b)| self.bonds[b].order.twice())
            .sum()
    }

    pub fn aromatic_bond_count(&self, i: usize) -> usize {
        self.adjacency[i]
            .iter()
            .filter(|&&(_, b)| self.bonds[b].order == BondOrder::Aromatic)
            .count()
    }

    pub fn connection_sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_connection_site())
            .map(|(i, _)| i)
    }

    pub fn heavy_atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_connection_site())
            .map(|(i, _)| i)
    }

    pub fn count_components(&self) -> usize {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.count_components() <= 1
    }

    /// Relabels atoms: atom `i` of `self` becomes atom `perm[i]` of the
    /// result. Bonds keep their relative order.
    pub fn permuted(&self, perm: &[usize]) -> MolGraph {
        assert_eq!(perm.len(), self.atoms.len(), "permutation length mismatch");
        let mut atoms = vec![Atom::star(); self.atoms.len()];
        for (i, &p) in perm.iter().enumerate() {
            atoms[p] = self.atoms[i];
        }
        let mut out = MolGraph::new();
        for atom in atoms {
            out.add_atom(atom);
        }
        for bond in &self.bonds {
            out.add_bond(perm[bond.a], perm[bond.b], bond.order)
                .expect("permutation preserves simplicity");
        }
        out
    }

    /// Same graph with bonds stored as `(low, high)` pairs in sorted order,
    /// so that structurally equal graphs on the same atom numbering compare
    /// equal.
    pub fn with_sorted_bonds(&self) -> MolGraph {
        let mut bonds: Vec<(usize, usize, BondOrder)> = self
            .bonds
            .iter()
            .map(|b| (b.a.min(b.b), b.a.max(b.b), b.order))
            .collect();
        bonds.sort_unstable();
        let mut out = MolGraph::new();
        for &atom in &self.atoms {
            out.add_atom(atom);
        }
        for (a, b, order) in bonds {
            out.add_bond(a, b, order).expect("same simple graph");
        }
        out
    }

    /// Subgraph induced by `atoms`, renumbered in the given order.
    pub fn induced_subgraph(&self, atoms: &[usize]) -> MolGraph {
        let mut index = vec![usize::MAX; self.atoms.len()];
        let mut out = MolGraph::new();
        for &a in atoms {
            index[a] = out.add_atom(self.atoms[a]);
        }
        for bond in &self.bonds {
            let (ia, ib) = (index[bond.a], index[bond.b]);
            if ia != usize::MAX && ib != usize::MAX {
                out.add_bond(ia, ib, bond.order).expect("induced subgraph is simple");
            }
        }
        out
    }
}
