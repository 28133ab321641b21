//! Motif-by-motif molecule generation.
//!
//! A partial molecule keeps its open `*` sites in a first-in first-out
//! queue. Each step pops the head site and picks, among every vocabulary
//! site and every other open site of the partial molecule with the same bond
//! order, either a motif to attach or a site to bond to (closing a ring).
//! Choices come from a pluggable [`Policy`].

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::chem::{repair_aromaticity, valence_check, Atom, BondOrder, MolGraph};
use crate::tokenizer::{Decision, Trajectory};
use crate::vocab::{Motif, MotifVocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("the vocabulary is empty")]
    EmptyVocabulary,
    #[error("no candidate shares the bond order of site {focus}")]
    NoCompatibleCandidate { focus: usize },
    #[error("motif {0:?} is not in the vocabulary")]
    UnknownMotif(String),
    #[error("atom {site} of motif {motif:?} is not a connection site")]
    InvalidSite { motif: String, site: usize },
    #[error("site {focus} cannot bond to {target}: bond orders or atoms are incompatible")]
    IncompatibleBond { focus: usize, target: usize },
    #[error("expected to focus site {expected}, but the queue head is {found:?}")]
    FocusMismatch { expected: usize, found: Option<usize> },
    #[error("trajectory ended with {0} open sites")]
    Unfinished(usize),
    #[error("generation is already finished")]
    Terminal,
    #[error("step limit of {0} reached")]
    StepLimit(usize),
    #[error("the finished molecule fails the valence check")]
    Irreparable,
}

/// Vocabulary arranged for fast candidate enumeration.
#[derive(Debug, Clone)]
pub struct PreparedVocab<'v> {
    pub vocab: &'v MotifVocabulary,
    /// Motifs in vocabulary order, with frequencies.
    motifs: Vec<(&'v Motif, u64)>,
    index: HashMap<&'v str, usize>,
    /// All vocabulary sites as (motif index, position in `motif.sites`).
    sites: Vec<(usize, usize)>,
    /// Site indices per bond order.
    by_order: [Vec<usize>; 4],
    /// Site type id of each vocabulary site.
    site_type: Vec<usize>,
    type_ids: HashMap<String, usize>,
    /// Symmetric attachment counts between site type ids.
    attach: HashMap<(usize, usize), u64>,
}

impl<'v> PreparedVocab<'v> {
    pub fn new(vocab: &'v MotifVocabulary) -> Self {
        let motifs: Vec<(&Motif, u64)> = vocab.entries.values().map(|e| (&e.motif, e.frequency)).collect();
        let index = motifs.iter().enumerate().map(|(i, (m, _))| (m.smiles.as_str(), i)).collect();
        let mut type_ids: HashMap<String, usize> = HashMap::new();
        let mut intern = |key: String| {
            let next = type_ids.len();
            *type_ids.entry(key).or_insert(next)
        };
        let mut sites = Vec::new();
        let mut by_order: [Vec<usize>; 4] = Default::default();
        let mut site_type = Vec::new();
        for (m, (motif, _)) in motifs.iter().enumerate() {
            for (s, site) in motif.sites.iter().enumerate() {
                by_order[site.order.index()].push(sites.len());
                sites.push((m, s));
                site_type.push(intern(motif.site_type(site)));
            }
        }
        let mut attach = HashMap::new();
        for ((a, b), &count) in &vocab.attachments {
            let (ia, ib) = (intern(a.clone()), intern(b.clone()));
            attach.insert((ia, ib), count);
            attach.insert((ib, ia), count);
        }
        PreparedVocab {
            vocab,
            motifs,
            index,
            sites,
            by_order,
            site_type,
            type_ids,
            attach,
        }
    }

    pub fn num_motifs(&self) -> usize {
        self.motifs.len()
    }

    pub fn motif(&self, i: usize) -> &'v Motif {
        self.motifs[i].0
    }

    pub fn frequency(&self, i: usize) -> u64 {
        self.motifs[i].1
    }

    pub fn motif_index(&self, smiles: &str) -> Option<usize> {
        self.index.get(smiles).copied()
    }

    /// Type id of a site, if its type occurs in the vocabulary.
    pub fn type_id(&self, motif: &Motif, star: usize) -> Option<usize> {
        let site = motif.site_at(star)?;
        self.type_ids.get(&motif.site_type(site)).copied()
    }

    pub fn attachment_count(&self, a: Option<usize>, b: Option<usize>) -> u64 {
        match (a, b) {
            (Some(a), Some(b)) => self.attach.get(&(a, b)).copied().unwrap_or(0),
            _ => 0,
        }
    }
}

/// One way to resolve the focused site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    /// Attach vocabulary motif `motif` through its site `star`.
    Attach { motif: usize, star: usize, site_type: usize },
    /// Bond to another open site of the partial molecule.
    Cyclize { target: usize },
}

/// Scores starts and connections. Higher is better; selection is argmax in
/// greedy mode and softmax sampling otherwise. `context` is an opaque
/// per-molecule value (the sampling seed) a learned policy may use as its
/// latent input.
pub trait Policy: Sync {
    fn score_start(&self, vocab: &PreparedVocab<'_>, context: u64) -> Vec<f64>;
    fn score_connections(
        &self,
        vocab: &PreparedVocab<'_>,
        state: &GenerationState,
        focus: usize,
        candidates: &[Candidate],
        context: u64,
    ) -> Vec<f64>;
}

/// Frequency baseline: starts scored by log motif frequency; attachments by
/// log(1 + site-pair count) + log motif frequency; ring closures by
/// log(1 + weight * site-pair count). Attaching a motif that opens `s` new
/// sites costs `growth_penalty * s * heavy atoms so far`, so molecules stop
/// growing. Scores are divided by the temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPolicy {
    pub cyclize_weight: f64,
    pub growth_penalty: f64,
    pub temperature: f64,
}

impl Default for FrequencyPolicy {
    fn default() -> Self {
        FrequencyPolicy {
            cyclize_weight: 1.0,
            growth_penalty: 0.05,
            temperature: 1.0,
        }
    }
}

impl Policy for FrequencyPolicy {
    fn score_start(&self, vocab: &PreparedVocab<'_>, _context: u64) -> Vec<f64> {
        (0..vocab.num_motifs())
            .map(|i| (vocab.frequency(i).max(1) as f64).ln() / self.temperature)
            .collect()
    }

    fn score_connections(
        &self,
        vocab: &PreparedVocab<'_>,
        state: &GenerationState,
        focus: usize,
        candidates: &[Candidate],
        _context: u64,
    ) -> Vec<f64> {
        let focus_type = state.site_type(focus);
        let size = state.heavy_atom_count() as f64;
        candidates
            .iter()
            .map(|c| {
                let score = match *c {
                    Candidate::Attach { motif, site_type, .. } => {
                        let pair = vocab.attachment_count(focus_type, Some(site_type)) as f64;
                        let opened = vocab.motif(motif).sites.len().saturating_sub(1) as f64;
                        (1.0 + pair).ln() + (vocab.frequency(motif).max(1) as f64).ln()
                            - self.growth_penalty * opened * size
                    }
                    Candidate::Cyclize { target } => {
                        let pair = vocab.attachment_count(focus_type, state.site_type(target)) as f64;
                        (1.0 + self.cyclize_weight * pair).ln()
                    }
                };
                score / self.temperature
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Greedy,
    /// Softmax sampling, optionally restricted to the `top_k` best scores.
    Sample { top_k: Option<usize> },
}

/// A partial molecule under construction. Atoms live in an arena; removed
/// sites leave tombstones so atom ids stay stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationState {
    atoms: Vec<Option<Atom>>,
    adjacency: Vec<Vec<(usize, BondOrder)>>,
    site_types: Vec<Option<usize>>,
    queue: VecDeque<usize>,
    steps: usize,
}

impl GenerationState {
    /// A partial molecule consisting of one motif, its sites queued in
    /// canonical order.
    pub fn from_motif(motif: &Motif, vocab: &PreparedVocab<'_>) -> Self {
        let mut state = GenerationState {
            atoms: Vec::new(),
            adjacency: Vec::new(),
            site_types: Vec::new(),
            queue: VecDeque::new(),
            steps: 0,
        };
        state.place(motif, None, vocab);
        state
    }

    /// Appends a motif's atoms (except `skip`) and queues its sites. Returns
    /// the arena id of each motif atom.
    fn place(&mut self, motif: &Motif, skip: Option<usize>, vocab: &PreparedVocab<'_>) -> Vec<Option<usize>> {
        let g = &motif.graph;
        let mut ids = vec![None; g.num_atoms()];
        for i in 0..g.num_atoms() {
            if Some(i) == skip {
                continue;
            }
            let id = self.atoms.len();
            self.atoms.push(Some(*g.atom(i)));
            self.adjacency.push(Vec::new());
            let is_site = g.atom(i).is_connection_site();
            self.site_types.push(if is_site { vocab.type_id(motif, i) } else { None });
            if is_site {
                self.queue.push_back(id);
            }
            ids[i] = Some(id);
        }
        for b in g.bonds() {
            if let (Some(x), Some(y)) = (ids[b.a], ids[b.b]) {
                self.adjacency[x].push((y, b.order));
                self.adjacency[y].push((x, b.order));
            }
        }
        ids
    }

    pub fn is_terminal(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn queue(&self) -> &VecDeque<usize> {
        &self.queue
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of `*` atoms currently in the partial molecule.
    pub fn open_sites(&self) -> usize {
        self.atoms.iter().flatten().filter(|a| a.is_connection_site()).count()
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().flatten().filter(|a| !a.is_connection_site()).count()
    }

    pub fn site_type(&self, site: usize) -> Option<usize> {
        self.site_types.get(site).copied().flatten()
    }

    fn is_open_site(&self, id: usize) -> bool {
        self.atoms.get(id).copied().flatten().is_some_and(|a| a.is_connection_site())
    }

    /// Anchor atom and bond order of an open site.
    pub fn site(&self, id: usize) -> Option<(usize, BondOrder)> {
        if !self.is_open_site(id) {
            return None;
        }
        self.adjacency[id].first().copied()
    }

    fn bonded(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].iter().any(|&(n, _)| n == b)
    }

    fn remove_site(&mut self, id: usize) -> (usize, BondOrder) {
        let (anchor, order) = self.site(id).expect("open site");
        self.atoms[id] = None;
        self.adjacency[id].clear();
        self.adjacency[anchor].retain(|&(n, _)| n != id);
        self.queue.retain(|&q| q != id);
        (anchor, order)
    }

    fn connect(&mut self, a: usize, b: usize, order: BondOrder) {
        self.adjacency[a].push((b, order));
        self.adjacency[b].push((a, order));
    }

    /// Whether `focus` may close a ring with `target`.
    fn can_cyclize(&self, focus: usize, target: usize) -> bool {
        match (self.site(focus), self.site(target)) {
            (Some((fa, fo)), Some((ta, to))) => {
                focus != target && fo == to && fa != ta && !self.bonded(fa, ta)
            }
            _ => false,
        }
    }

    /// Replaces the focus site and the motif's site `star` with one bond
    /// between their anchors.
    fn attach(
        &mut self,
        focus: usize,
        motif: &Motif,
        star: usize,
        vocab: &PreparedVocab<'_>,
    ) -> Result<(), GenerationError> {
        let site = motif.site_at(star).ok_or_else(|| GenerationError::InvalidSite {
            motif: motif.smiles.clone(),
            site: star,
        })?;
        match self.site(focus) {
            Some((_, order)) if order == site.order => {}
            _ => return Err(GenerationError::IncompatibleBond { focus, target: star }),
        }
        let (anchor, order) = self.remove_site(focus);
        let ids = self.place(motif, Some(star), vocab);
        let new_anchor = ids[site.anchor].expect("anchor is a real atom");
        self.connect(anchor, new_anchor, order);
        Ok(())
    }

    fn cyclize(&mut self, focus: usize, target: usize) -> Result<(), GenerationError> {
        if !self.can_cyclize(focus, target) {
            return Err(GenerationError::IncompatibleBond { focus, target });
        }
        let (a, order) = self.remove_site(focus);
        let (b, _) = self.remove_site(target);
        self.connect(a, b, order);
        Ok(())
    }

    /// Compacts the arena into a graph (sites included).
    pub fn partial(&self) -> MolGraph {
        let mut mol = MolGraph::new();
        let mut new_id = vec![usize::MAX; self.atoms.len()];
        for (i, atom) in self.atoms.iter().enumerate() {
            if let Some(atom) = atom {
                new_id[i] = mol.add_atom(*atom);
            }
        }
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            for &(j, order) in nbrs {
                if i < j {
                    mol.add_bond(new_id[i], new_id[j], order).expect("arena graph is simple");
                }
            }
        }
        mol
    }

    /// Candidates for `focus`: every vocabulary site, then every other open
    /// site of the partial molecule it may close a ring with, all sharing
    /// the focus's bond order.
    pub fn candidates(&self, focus: usize, vocab: &PreparedVocab<'_>) -> Vec<Candidate> {
        let Some((_, order)) = self.site(focus) else {
            return Vec::new();
        };
        let mut out: Vec<Candidate> = vocab.by_order[order.index()]
            .iter()
            .map(|&s| {
                let (m, k) = vocab.sites[s];
                Candidate::Attach {
                    motif: m,
                    star: vocab.motif(m).sites[k].atom,
                    site_type: vocab.site_type[s],
                }
            })
            .collect();
        out.extend(
            self.queue
                .iter()
                .filter(|&&t| self.can_cyclize(focus, t))
                .map(|&target| Candidate::Cyclize { target }),
        );
        out
    }
}

/// Index of the chosen score.
pub fn select(scores: &[f64], mode: Mode, rng: &mut impl Rng) -> Option<usize> {
    if scores.is_empty() {
        return None;
    }
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let top_k = match mode {
        Mode::Greedy => return Some(best),
        Mode::Sample { top_k } => top_k,
    };
    let mut pool: Vec<usize> = (0..scores.len()).collect();
    if let Some(k) = top_k {
        pool.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        pool.truncate(k.max(1));
        pool.sort_unstable();
    }
    let max = scores[best];
    let weights: Vec<f64> = pool.iter().map(|&i| (scores[i] - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (&i, &w) in pool.iter().zip(&weights) {
        if x < w {
            return Some(i);
        }
        x -= w;
    }
    pool.last().copied()
}

/// Picks the first motif.
pub fn start_generation(
    vocab: &PreparedVocab<'_>,
    policy: &dyn Policy,
    mode: Mode,
    rng: &mut impl Rng,
    context: u64,
) -> Result<GenerationState, GenerationError> {
    if vocab.num_motifs() == 0 {
        return Err(GenerationError::EmptyVocabulary);
    }
    let scores = policy.score_start(vocab, context);
    let m = select(&scores, mode, rng).ok_or(GenerationError::EmptyVocabulary)?;
    Ok(GenerationState::from_motif(vocab.motif(m), vocab))
}

/// Resolves the site at the head of the queue.
pub fn generation_step(
    state: &mut GenerationState,
    vocab: &PreparedVocab<'_>,
    policy: &dyn Policy,
    mode: Mode,
    rng: &mut impl Rng,
    context: u64,
) -> Result<(), GenerationError> {
    let focus = *state.queue.front().ok_or(GenerationError::Terminal)?;
    state.queue.pop_front();
    let candidates = state.candidates(focus, vocab);
    if candidates.is_empty() {
        return Err(GenerationError::NoCompatibleCandidate { focus });
    }
    let scores = policy.score_connections(vocab, state, focus, &candidates, context);
    let chosen = select(&scores, mode, rng).ok_or(GenerationError::NoCompatibleCandidate { focus })?;
    state.steps += 1;
    match candidates[chosen] {
        Candidate::Attach { motif, star, .. } => state.attach(focus, vocab.motif(motif), star, vocab),
        Candidate::Cyclize { target } => state.cyclize(focus, target),
    }
}

/// Turns a finished state into a molecule, removing aromaticity from ring
/// systems that cannot be aromatic.
pub fn finalize(state: &GenerationState) -> Result<MolGraph, GenerationError> {
    if !state.is_terminal() {
        return Err(GenerationError::Unfinished(state.queue.len()));
    }
    let mut mol = state.partial();
    repair_aromaticity(&mut mol);
    if valence_check(&mol) {
        Ok(mol)
    } else {
        Err(GenerationError::Irreparable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateConfig {
    pub mode: Mode,
    pub seed: u64,
    pub max_steps: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            mode: Mode::Greedy,
            seed: 0,
            max_steps: 100,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenerationReport {
    pub requested: usize,
    pub emitted: usize,
    /// Generations stopped by the step limit.
    pub aborted: usize,
    /// Generations that failed for any other reason, by message.
    pub errors: usize,
    pub error_messages: Vec<String>,
}

/// Random stream for molecule `index`: one ChaCha stream per molecule, so
/// results do not depend on scheduling.
pub fn molecule_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Generates one molecule.
pub fn generate_one(
    vocab: &PreparedVocab<'_>,
    policy: &dyn Policy,
    config: &GenerateConfig,
    index: u64,
) -> Result<MolGraph, GenerationError> {
    let mut rng = molecule_rng(config.seed, index);
    let context = config.seed ^ index.rotate_left(32);
    let mut state = start_generation(vocab, policy, config.mode, &mut rng, context)?;
    while !state.is_terminal() {
        if state.steps >= config.max_steps {
            return Err(GenerationError::StepLimit(config.max_steps));
        }
        generation_step(&mut state, vocab, policy, config.mode, &mut rng, context)?;
    }
    finalize(&state)
}

/// Generates `n` molecules in parallel. Output order is by molecule index.
pub fn generate(
    vocab: &MotifVocabulary,
    policy: &dyn Policy,
    n: usize,
    config: &GenerateConfig,
) -> (Vec<MolGraph>, GenerationReport) {
    let prepared = PreparedVocab::new(vocab);
    let results: Vec<Result<MolGraph, GenerationError>> = (0..n as u64)
        .into_par_iter()
        .map(|i| generate_one(&prepared, policy, config, i))
        .collect();
    let mut report = GenerationReport {
        requested: n,
        ..Default::default()
    };
    let mut out = Vec::with_capacity(n);
    for r in results {
        match r {
            Ok(m) => {
                report.emitted += 1;
                out.push(m);
            }
            Err(GenerationError::StepLimit(_)) => report.aborted += 1,
            Err(e) => {
                report.errors += 1;
                if report.error_messages.len() < 10 {
                    report.error_messages.push(e.to_string());
                }
            }
        }
    }
    (out, report)
}

/// Executes a recorded trajectory step by step.
pub fn replay_trajectory(traj: &Trajectory, vocab: &PreparedVocab<'_>) -> Result<MolGraph, GenerationError> {
    let lookup = |smiles: &str| {
        vocab
            .motif_index(smiles)
            .map(|i| vocab.motif(i))
            .ok_or_else(|| GenerationError::UnknownMotif(smiles.to_string()))
    };
    let mut state = GenerationState::from_motif(lookup(&traj.start)?, vocab);
    for step in &traj.steps {
        let head = state.queue.front().copied();
        if head != Some(step.focus) {
            return Err(GenerationError::FocusMismatch {
                expected: step.focus,
                found: head,
            });
        }
        state.queue.pop_front();
        state.steps += 1;
        match &step.decision {
            Decision::Attach { motif, site } => state.attach(step.focus, lookup(motif)?, *site, vocab)?,
            Decision::Cyclize(target) => state.cyclize(step.focus, *target)?,
        }
    }
    finalize(&state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::{parse_smiles, write_smiles};

    fn vocab_of(motifs: &[(&str, u64)]) -> MotifVocabulary {
        let mut v = MotifVocabulary::default();
        for &(s, f) in motifs {
            v.add_motif(Motif::parse(s).unwrap(), f);
        }
        v
    }

    #[test]
    fn zero_site_motif_is_immediately_terminal() {
        let vocab = vocab_of(&[("CCO", 1)]);
        let (mols, report) = generate(&vocab, &FrequencyPolicy::default(), 3, &GenerateConfig::default());
        assert_eq!(report.emitted, 3);
        assert!(mols.iter().all(|m| write_smiles(m) == "CCO"));
    }

    #[test]
    fn greedy_start_picks_the_most_frequent_motif() {
        let vocab = vocab_of(&[("CCO", 1), ("c1ccccc1", 5), ("CC", 2)]);
        let prepared = PreparedVocab::new(&vocab);
        let mut rng = molecule_rng(0, 0);
        let state = start_generation(&prepared, &FrequencyPolicy::default(), Mode::Greedy, &mut rng, 0).unwrap();
        assert_eq!(write_smiles(&state.partial()), "c1ccccc1");
    }

    #[test]
    fn aryl_attaches_bromine() {
        let mut vocab = vocab_of(&[("*c1ccccc1", 3), ("*Br", 1), ("*C", 1)]);
        vocab.add_attachment("*c1ccccc1@0-", "*Br@0-", 4);
        let prepared = PreparedVocab::new(&vocab);
        let mut state = GenerationState::from_motif(&Motif::parse("*c1ccccc1").unwrap(), &prepared);
        let policy = FrequencyPolicy::default();
        let mut rng = molecule_rng(0, 0);
        generation_step(&mut state, &prepared, &policy, Mode::Greedy, &mut rng, 0).unwrap();
        assert!(state.is_terminal());
        assert_eq!(write_smiles(&finalize(&state).unwrap()), write_smiles(&parse_smiles("Brc1ccccc1").unwrap()));
    }

    #[test]
    fn open_chain_closes_into_a_ring() {
        let vocab = vocab_of(&[("*=O", 1)]);
        let prepared = PreparedVocab::new(&vocab);
        let mut state = GenerationState::from_motif(&Motif::parse("*CCCCC*").unwrap(), &prepared);
        let mut rng = molecule_rng(0, 0);
        let cands = state.candidates(state.queue()[0], &prepared);
        assert_eq!(cands.len(), 1);
        generation_step(&mut state, &prepared, &FrequencyPolicy::default(), Mode::Greedy, &mut rng, 0).unwrap();
        assert!(state.is_terminal());
        assert_eq!(write_smiles(&finalize(&state).unwrap()), "C1CCCC1");
    }

    #[test]
    fn missing_bond_order_is_reported() {
        let vocab = vocab_of(&[("*C", 1)]);
        let prepared = PreparedVocab::new(&vocab);
        let mut state = GenerationState::from_motif(&Motif::parse("*=C").unwrap(), &prepared);
        let mut rng = molecule_rng(0, 0);
        let err = generation_step(&mut state, &prepared, &FrequencyPolicy::default(), Mode::Greedy, &mut rng, 0)
            .unwrap_err();
        assert!(matches!(err, GenerationError::NoCompatibleCandidate { .. }));
    }

    #[test]
    fn eight_membered_aromatic_ring_is_saturated() {
        let vocab = vocab_of(&[("*:c:c:c:c:*", 1)]);
        let prepared = PreparedVocab::new(&vocab);
        let half = Motif::parse("*:c:c:c:c:*").unwrap();
        let mut state = GenerationState::from_motif(&half, &prepared);
        let first = state.queue()[0];
        state.queue.pop_front();
        state.attach(first, &half, half.sites[0].atom, &prepared).unwrap();
        let focus = state.queue.pop_front().unwrap();
        let target = state.queue[0];
        state.cyclize(focus, target).unwrap();
        let mol = finalize(&state).unwrap();
        assert_eq!(write_smiles(&mol), "C1CCCCCCC1");
    }

    #[test]
    fn benzene_assembly_stays_aromatic() {
        let vocab = vocab_of(&[("*:c:c:c:*", 1)]);
        let prepared = PreparedVocab::new(&vocab);
        let half = Motif::parse("*:c:c:c:*").unwrap();
        let mut state = GenerationState::from_motif(&half, &prepared);
        let first = state.queue.pop_front().unwrap();
        state.attach(first, &half, half.sites[0].atom, &prepared).unwrap();
        let focus = state.queue.pop_front().unwrap();
        let target = state.queue[0];
        state.cyclize(focus, target).unwrap();
        assert_eq!(write_smiles(&finalize(&state).unwrap()), "c1ccccc1");
    }

    #[test]
    fn empty_vocabulary() {
        let vocab = MotifVocabulary::default();
        let (mols, report) = generate(&vocab, &FrequencyPolicy::default(), 2, &GenerateConfig::default());
        assert!(mols.is_empty());
        assert_eq!(report.errors, 2);
        let (mols, report) = generate(&vocab, &FrequencyPolicy::default(), 0, &GenerateConfig::default());
        assert!(mols.is_empty());
        assert_eq!(report.requested, 0);
    }

    #[test]
    fn greedy_selection_ignores_constant_shift() {
        let scores = [0.5, 2.0, 2.0, -1.0];
        let shifted: Vec<f64> = scores.iter().map(|s| s + 10.0).collect();
        let mut rng = molecule_rng(0, 0);
        assert_eq!(select(&scores, Mode::Greedy, &mut rng), Some(1));
        assert_eq!(select(&shifted, Mode::Greedy, &mut rng), Some(1));
        let top1 = select(&scores, Mode::Sample { top_k: Some(1) }, &mut rng);
        assert_eq!(top1, Some(1));
    }
}
