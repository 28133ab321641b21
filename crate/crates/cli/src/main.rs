use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use graphbpe::chem::{write_smiles, MolGraph, SmilesError};
use graphbpe::corpus::{parse_corpus, CorpusError};
use graphbpe::format::FormatError;
use graphbpe::generator::{generate, FrequencyPolicy, GenerateConfig, Mode};
use graphbpe::merging::pattern_key;
use graphbpe::metrics::evaluate;
use graphbpe::miner::Miner;
use graphbpe::ops::OpsList;
use graphbpe::tokenizer::{fragmentation_of, trajectory_of, Tokenizer};
use graphbpe::vocab::{build_motif_vocabulary, MotifVocabulary};
use rayon::prelude::*;

const OPS_FILE: &str = "ops.txt";
const VOCAB_FILE: &str = "vocab.txt";
const ATTACH_FILE: &str = "attach.txt";

const SMILES_HELP: &str = "\
Corpus files hold one SMILES per line, optionally followed by a tab and an id.
Blank lines and lines starting with '#' are skipped.

Supported SMILES subset: organic-subset atoms (B C N O P S F Cl Br I and
aromatic b c n o p s), bracket atoms with explicit H count and charge
(e.g. [NH4+], [nH], [O-]), the connection site '*', bonds - = # :, branches
and ring closures (digits and %nn). Not supported: isotopes, stereo
(/ \\ @), '.' components, atom classes and other elements.

Exit codes: 0 success, 1 other error, 2 usage, 3 input parse error,
4 file format or version error.";

#[derive(Parser)]
#[command(name = "graphbpe", version, about = "Connection-aware motif mining and generation", after_help = SMILES_HELP)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn merge operations and build the motif vocabulary.
    Mine {
        /// Corpus file (SMILES per line).
        #[arg(long)]
        corpus: PathBuf,
        /// Number of merge operations to learn.
        #[arg(short = 'k', long)]
        k: usize,
        /// Output directory for ops.txt, vocab.txt and attach.txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Cut molecules into fragments with learned operations.
    Fragmentize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        ops: PathBuf,
        /// Write connection-aware motifs (with '*' sites) instead of plain
        /// fragments.
        #[arg(long)]
        motifs: bool,
        /// Also write generation trajectories, one JSON record per line.
        #[arg(long)]
        trajectories: Option<PathBuf>,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate molecules from a motif vocabulary.
    Generate {
        #[arg(long)]
        vocab: PathBuf,
        /// Attachment table (default: attach.txt next to the vocabulary, if
        /// present).
        #[arg(long)]
        attach: Option<PathBuf>,
        /// Number of molecules to attempt.
        #[arg(short = 'n', long, default_value_t = 1000)]
        num: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Sample)]
        mode: ModeArg,
        /// Sample only among the k best candidates.
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        /// Score penalty per newly opened site and heavy atom already placed.
        #[arg(long, default_value_t = 0.05)]
        growth_penalty: f64,
        /// Give up on a molecule after this many steps.
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare generated molecules with a training set.
    Eval {
        #[arg(long)]
        generated: PathBuf,
        #[arg(long)]
        train: PathBuf,
        /// Report file (default: standard output).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List a vocabulary by frequency.
    InspectVocab {
        #[arg(long)]
        vocab: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Greedy,
    Sample,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<CorpusError>() || cause.is::<SmilesError>() {
            return 3;
        }
        if cause.is::<FormatError>() {
            return 4;
        }
    }
    1
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Mine { corpus, k, out } => mine(&corpus, k, &out),
        Command::Fragmentize {
            corpus,
            ops,
            motifs,
            trajectories,
            out,
        } => fragmentize(&corpus, &ops, motifs, trajectories.as_deref(), out.as_deref()),
        Command::Generate {
            vocab,
            attach,
            num,
            seed,
            mode,
            top_k,
            temperature,
            growth_penalty,
            max_steps,
            out,
        } => {
            if !(temperature > 0.0 && temperature.is_finite()) {
                bail!("--temperature must be a positive number");
            }
            if !(growth_penalty >= 0.0 && growth_penalty.is_finite()) {
                bail!("--growth-penalty must be a non-negative number");
            }
            let mode = match mode {
                ModeArg::Greedy => Mode::Greedy,
                ModeArg::Sample => Mode::Sample { top_k },
            };
            let config = GenerateConfig { mode, seed, max_steps };
            let policy = FrequencyPolicy {
                temperature,
                growth_penalty,
                ..FrequencyPolicy::default()
            };
            run_generate(&vocab, attach.as_deref(), num, &config, &policy, out.as_deref())
        }
        Command::Eval { generated, train, report } => eval(&generated, &train, report.as_deref()),
        Command::InspectVocab { vocab } => inspect_vocab(&vocab),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_corpus(path: &Path) -> Result<(Vec<String>, Vec<MolGraph>)> {
    let text = read(path)?;
    let entries = parse_corpus(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(entries.into_iter().map(|e| (e.id, e.mol)).unzip())
}

fn load_ops(path: &Path) -> Result<OpsList> {
    OpsList::from_text(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_vocab(path: &Path, attach: Option<&Path>) -> Result<MotifVocabulary> {
    let mut vocab = MotifVocabulary::from_vocab_text(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let attach = match attach {
        Some(p) => Some(p.to_path_buf()),
        None => path.parent().map(|d| d.join(ATTACH_FILE)).filter(|p| p.exists()),
    };
    if let Some(p) = attach {
        vocab
            .load_attach_text(&read(&p)?)
            .with_context(|| format!("in {}", p.display()))?;
    }
    Ok(vocab)
}

fn mine(corpus: &Path, k: usize, out: &Path) -> Result<()> {
    let (_, mols) = load_corpus(corpus)?;
    let mut miner = Miner::new(&mols);
    for _ in 0..k {
        if miner.step().is_none() {
            break;
        }
    }
    let ops = miner.into_ops();
    let vocab = build_motif_vocabulary(&mols, &ops);
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    write(&out.join(OPS_FILE), &ops.to_text())?;
    write(&out.join(VOCAB_FILE), &vocab.vocab_text())?;
    write(&out.join(ATTACH_FILE), &vocab.attach_text())?;
    let fragments: u64 = vocab.entries.values().map(|e| e.frequency).sum();
    let mean = if mols.is_empty() { 0.0 } else { fragments as f64 / mols.len() as f64 };
    println!("molecules: {}", mols.len());
    println!("operations: {} (requested {k})", ops.len());
    println!("motifs: {}", vocab.len());
    println!("mean fragments per molecule: {mean:.3}");
    Ok(())
}

fn fragmentize(
    corpus: &Path,
    ops: &Path,
    motifs: bool,
    trajectories: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    let tokenizer = Tokenizer::new(&load_ops(ops)?);
    let (ids, mols) = load_corpus(corpus)?;
    let lines: Vec<(String, String)> = mols
        .par_iter()
        .map(|mol| {
            let graph = tokenizer.apply(mol);
            let frag = fragmentation_of(&graph);
            let parts: Vec<String> = if motifs {
                frag.motif_strings().into_iter().map(str::to_string).collect()
            } else {
                frag.motifs
                    .iter()
                    .map(|m| {
                        let atoms: Vec<usize> = m.source_atoms.iter().flatten().copied().collect();
                        let mut sorted = atoms.clone();
                        sorted.sort_unstable();
                        pattern_key(mol, &sorted)
                    })
                    .collect()
            };
            let traj = trajectory_of(&frag, graph.atom_ranks()).to_json();
            (parts.join("|"), traj)
        })
        .collect();
    let mut text = String::new();
    let mut jsonl = String::new();
    for (id, (line, traj)) in ids.iter().zip(&lines) {
        writeln!(text, "{id}\t{line}").unwrap();
        writeln!(jsonl, "{traj}").unwrap();
    }
    if let Some(p) = trajectories {
        write(p, &jsonl)?;
    }
    emit(out, &text)
}

fn run_generate(
    vocab: &Path,
    attach: Option<&Path>,
    n: usize,
    config: &GenerateConfig,
    policy: &FrequencyPolicy,
    out: Option<&Path>,
) -> Result<()> {
    let vocab = load_vocab(vocab, attach)?;
    if vocab.is_empty() {
        bail!("the vocabulary is empty");
    }
    let (mols, report) = generate(&vocab, policy, n, config);
    let smiles: Vec<String> = mols.par_iter().map(write_smiles).collect();
    let mut text = String::new();
    for s in &smiles {
        writeln!(text, "{s}").unwrap();
    }
    emit(out, &text)?;
    eprintln!(
        "requested {}, emitted {}, step limit {}, failed {}",
        report.requested, report.emitted, report.aborted, report.errors
    );
    for message in &report.error_messages {
        eprintln!("  {message}");
    }
    Ok(())
}

fn eval(generated: &Path, train: &Path, report: Option<&Path>) -> Result<()> {
    let (_, training) = load_corpus(train)?;
    let text = read(generated)?;
    let lines: Vec<&str> = graphbpe::corpus::corpus_lines(&text).into_iter().map(|l| l.smiles).collect();
    let r = evaluate(&lines, &training)?;
    emit(report, &r.to_text())
}

fn inspect_vocab(path: &Path) -> Result<()> {
    let vocab = load_vocab(path, None)?;
    let mut entries: Vec<_> = vocab.entries.values().collect();
    entries.sort_by(|a, b| b.frequency.cmp(&a.frequency).then_with(|| a.motif.smiles.cmp(&b.motif.smiles)));
    let mut text = format!("{} motifs\n", entries.len());
    for e in entries {
        writeln!(
            text,
            "{:>8}  {:<40}  heavy={} sites={}",
            e.frequency,
            e.motif.smiles,
            e.motif.heavy_atom_count(),
            e.motif.site_list()
        )
        .unwrap();
    }
    print!("{text}");
    Ok(())
}
