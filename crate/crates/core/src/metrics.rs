//! Distribution-learning metrics: validity, uniqueness, novelty and a
//! descriptor-histogram KL score.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::chem::{parse_smiles_unchecked, valence_check, write_smiles, BondOrder, Element, MolGraph};

const HYDROGEN_WEIGHT: f64 = 1.008;
const CONTINUOUS_BINS: usize = 100;
const SMOOTHING: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("the generated set is empty")]
    EmptyGenerated,
    #[error("the training set is empty")]
    EmptyTraining,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptorVector {
    /// Daltons, hydrogens included.
    pub mol_weight: f64,
    pub heavy_atom_count: usize,
    /// Bonds minus atoms plus connected components.
    pub cycle_rank: usize,
    pub aromatic_atom_fraction: f64,
    /// Fraction of heavy atoms that are not carbon.
    pub heteroatom_fraction: f64,
    pub halogen_count: usize,
    /// Fractions of single, double, triple and aromatic bonds; all zero for
    /// molecules without bonds.
    pub bond_order_histogram: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescriptorKind {
    Continuous,
    Integer,
}

/// Scalar descriptor names, in the order of [`DescriptorVector::values`].
pub const DESCRIPTOR_NAMES: [&str; 10] = [
    "mol_weight",
    "heavy_atom_count",
    "cycle_rank",
    "aromatic_atom_fraction",
    "heteroatom_fraction",
    "halogen_count",
    "single_bond_fraction",
    "double_bond_fraction",
    "triple_bond_fraction",
    "aromatic_bond_fraction",
];

pub const DESCRIPTOR_KINDS: [DescriptorKind; 10] = {
    use DescriptorKind::*;
    [
        Continuous, Integer, Integer, Continuous, Continuous, Integer, Continuous, Continuous, Continuous,
        Continuous,
    ]
};

impl DescriptorVector {
    pub fn values(&self) -> [f64; 10] {
        let h = self.bond_order_histogram;
        [
            self.mol_weight,
            self.heavy_atom_count as f64,
            self.cycle_rank as f64,
            self.aromatic_atom_fraction,
            self.heteroatom_fraction,
            self.halogen_count as f64,
            h[0],
            h[1],
            h[2],
            h[3],
        ]
    }
}

pub fn compute_descriptors(mol: &MolGraph) -> DescriptorVector {
    let mut weight = 0.0;
    let mut heavy = 0usize;
    let mut aromatic = 0usize;
    let mut hetero = 0usize;
    let mut halogens = 0usize;
    for atom in mol.atoms() {
        weight += atom.element.atomic_weight() + atom.hydrogens as f64 * HYDROGEN_WEIGHT;
        if atom.element == Element::Star {
            continue;
        }
        heavy += 1;
        aromatic += atom.aromatic as usize;
        hetero += (atom.element != Element::C) as usize;
        halogens += atom.element.is_halogen() as usize;
    }
    let mut histogram = [0.0; 4];
    for bond in mol.bonds() {
        histogram[bond.order.index()] += 1.0;
    }
    if mol.num_bonds() > 0 {
        for h in &mut histogram {
            *h /= mol.num_bonds() as f64;
        }
    }
    debug_assert_eq!(BondOrder::Aromatic.index(), 3);
    let fraction = |x: usize| if heavy == 0 { 0.0 } else { x as f64 / heavy as f64 };
    DescriptorVector {
        mol_weight: weight,
        heavy_atom_count: heavy,
        cycle_rank: mol.num_bonds() + mol.count_components() - mol.num_atoms(),
        aromatic_atom_fraction: fraction(aromatic),
        heteroatom_fraction: fraction(hetero),
        halogen_count: halogens,
        bond_order_histogram: histogram,
    }
}

/// Smoothed histograms of training and generated values over shared bins.
/// Continuous values use equal-width bins over the training range (values
/// outside it fall into the edge bins); integer values get one bin each.
fn histograms(train: &[f64], gen: &[f64], kind: DescriptorKind) -> (Vec<f64>, Vec<f64>) {
    let (bins, bin_of): (usize, Box<dyn Fn(f64) -> usize>) = match kind {
        DescriptorKind::Continuous => {
            let lo = train.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = train.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let width = if hi > lo { (hi - lo) / CONTINUOUS_BINS as f64 } else { 1.0 };
            let f = move |v: f64| (((v - lo) / width).floor().max(0.0) as usize).min(CONTINUOUS_BINS - 1);
            (CONTINUOUS_BINS, Box::new(f))
        }
        DescriptorKind::Integer => {
            let values: BTreeSet<i64> = train.iter().chain(gen).map(|&v| v.round() as i64).collect();
            let index: BTreeMap<i64, usize> = values.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
            let n = index.len();
            (n, Box::new(move |v: f64| index[&(v.round() as i64)]))
        }
    };
    let hist = |values: &[f64]| {
        let mut counts = vec![0.0; bins];
        for &v in values {
            counts[bin_of(v)] += 1.0;
        }
        let total = values.len() as f64 + SMOOTHING * bins as f64;
        counts.into_iter().map(|c| (c + SMOOTHING) / total).collect::<Vec<f64>>()
    };
    (hist(train), hist(gen))
}

/// KL(p || q) of two distributions over the same bins.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(&pi, _)| pi > 0.0).map(|(&pi, &qi)| pi * (pi / qi).ln()).sum()
}

/// KL(train || generated) of one descriptor's value lists.
pub fn descriptor_kl(train: &[f64], gen: &[f64], kind: DescriptorKind) -> f64 {
    let (p, q) = histograms(train, gen, kind);
    kl_divergence(&p, &q).max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub generated: usize,
    pub valid: usize,
    pub unique: usize,
    pub novel: usize,
    pub validity: f64,
    pub uniqueness: f64,
    /// Novel fraction of the unique valid molecules.
    pub novelty: f64,
    pub kl_div_score: f64,
    /// (descriptor name, KL) pairs.
    pub kl: Vec<(&'static str, f64)>,
}

impl EvalReport {
    pub fn to_text(&self) -> String {
        let mut out = String::from("# graphbpe evaluation\n# novelty = novel unique valid / unique valid\n");
        for (k, v) in [("generated", self.generated), ("valid", self.valid), ("unique", self.unique), ("novel", self.novel)] {
            writeln!(out, "{k}={v}").unwrap();
        }
        for (k, v) in [
            ("validity", self.validity),
            ("uniqueness", self.uniqueness),
            ("novelty", self.novelty),
            ("kl_div_score", self.kl_div_score),
        ] {
            writeln!(out, "{k}={v:.6}").unwrap();
        }
        out.push_str("# descriptor\tkl\texp(-kl)\n");
        for (name, kl) in &self.kl {
            writeln!(out, "kl.{name}={kl:.6}\t{:.6}", (-kl).exp()).unwrap();
        }
        out
    }
}

/// Evaluates generated SMILES against a training set. Generated strings that
/// fail to parse or fail the valence check count as invalid.
pub fn evaluate<S: AsRef<str> + Sync>(generated: &[S], training: &[MolGraph]) -> Result<EvalReport, MetricsError> {
    if generated.is_empty() {
        return Err(MetricsError::EmptyGenerated);
    }
    if training.is_empty() {
        return Err(MetricsError::EmptyTraining);
    }
    let valid: Vec<MolGraph> = generated
        .par_iter()
        .map(|s| parse_smiles_unchecked(s.as_ref()).ok().filter(valence_check))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    evaluate_molecules(generated.len(), &valid, training)
}

/// Evaluates already-parsed molecules; `total` is the number generated,
/// including ones that are not in `valid`.
pub fn evaluate_molecules(total: usize, valid: &[MolGraph], training: &[MolGraph]) -> Result<EvalReport, MetricsError> {
    if total == 0 {
        return Err(MetricsError::EmptyGenerated);
    }
    if training.is_empty() {
        return Err(MetricsError::EmptyTraining);
    }
    let valid: Vec<&MolGraph> = valid.iter().filter(|m| valence_check(m)).collect();
    let canon_gen: Vec<String> = valid.par_iter().map(|m| write_smiles(m)).collect();
    let canon_train: HashSet<String> = training.par_iter().map(write_smiles).collect();
    let unique: BTreeSet<&String> = canon_gen.iter().collect();
    let novel = unique.iter().filter(|s| !canon_train.contains(s.as_str())).count();

    let d_train: Vec<[f64; 10]> = training.par_iter().map(|m| compute_descriptors(m).values()).collect();
    let d_gen: Vec<[f64; 10]> = valid.par_iter().map(|m| compute_descriptors(m).values()).collect();
    let mut kl = Vec::with_capacity(10);
    for (k, (&name, &kind)) in DESCRIPTOR_NAMES.iter().zip(&DESCRIPTOR_KINDS).enumerate() {
        let t: Vec<f64> = d_train.iter().map(|v| v[k]).collect();
        let g: Vec<f64> = d_gen.iter().map(|v| v[k]).collect();
        kl.push((name, descriptor_kl(&t, &g, kind)));
    }
    let kl_div_score = kl.iter().map(|(_, d)| (-d).exp()).sum::<f64>() / kl.len() as f64;
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(EvalReport {
        generated: total,
        valid: valid.len(),
        unique: unique.len(),
        novel,
        validity: ratio(valid.len(), total),
        uniqueness: ratio(unique.len(), valid.len()),
        novelty: ratio(novel, unique.len()),
        kl_div_score,
        kl,
    })
}
