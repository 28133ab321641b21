use std::fmt;

/// Elements accepted by the SMILES subset, plus the `*` connection site.
///
/// The declaration order is the canonical element order: `*` first, then by
/// atomic number. Canonical strings start from the lowest-ordered atom, so a
/// connection site, when present, always leads a motif string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Star,
    B,
    C,
    N,
    O,
    F,
    P,
    S,
    Cl,
    Br,
    I,
}

impl Element {
    pub const ALL: [Element; 11] = [
        Element::Star,
        Element::B,
        Element::C,
        Element::N,
        Element::O,
        Element::F,
        Element::P,
        Element::S,
        Element::Cl,
        Element::Br,
        Element::I,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::Star => "*",
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::F => "F",
            Element::P => "P",
            Element::S => "S",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn aromatic_symbol(self) -> Option<&'static str> {
        match self {
            Element::B => Some("b"),
            Element::C => Some("c"),
            Element::N => Some("n"),
            Element::O => Some("o"),
            Element::P => Some("p"),
            Element::S => Some("s"),
            _ => None,
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Element> {
        Element::ALL.iter().copied().find(|e| e.symbol() == symbol)
    }

    pub fn can_be_aromatic(self) -> bool {
        self.aromatic_symbol().is_some()
    }

    pub fn is_halogen(self) -> bool {
        matches!(self, Element::F | Element::Cl | Element::Br | Element::I)
    }

    /// Standard atomic weight in Daltons; `*` weighs nothing.
    pub fn atomic_weight(self) -> f64 {
        match self {
            Element::Star => 0.0,
            Element::B => 10.81,
            Element::C => 12.011,
            Element::N => 14.007,
            Element::O => 15.999,
            Element::F => 18.998,
            Element::P => 30.974,
            Element::S => 32.06,
            Element::Cl => 35.45,
            Element::Br => 79.904,
            Element::I => 126.904,
        }
    }

    /// Allowed total valences (bond orders plus hydrogens) for a formal
    /// charge, ascending. Empty for unsupported combinations.
    pub fn allowed_valences(self, charge: i8) -> &'static [u8] {
        match (self, charge) {
            (Element::B, 0) => &[3],
            (Element::B, -1) => &[4],
            (Element::C, 0) => &[4],
            (Element::C, 1) | (Element::C, -1) => &[3],
            (Element::N, 0) => &[3],
            (Element::N, 1) => &[4],
            (Element::N, -1) => &[2],
            (Element::O, 0) => &[2],
            (Element::O, 1) => &[3],
            (Element::O, -1) => &[1],
            (Element::F | Element::Cl | Element::Br | Element::I, 0) => &[1],
            (Element::F | Element::Cl | Element::Br | Element::I, -1) => &[0],
            (Element::P, 0) => &[3, 5],
            (Element::P, 1) => &[4],
            (Element::S, 0) => &[2, 4, 6],
            (Element::S, 1) => &[3],
            (Element::S, -1) => &[1],
            _ => &[],
        }
    }

    /// Whether the element may appear without brackets in SMILES.
    pub fn in_organic_subset(self) -> bool {
        !matches!(self, Element::Star)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
