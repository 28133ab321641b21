use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn graphbpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphbpe")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    path(dir, name)
}

#[test]
fn worked_example_end_to_end() {
    let dir = TempDir::new().unwrap();
    let corpus = write(dir.path(), "c.smi", "CC\nCN\nCNN\nCN=O\nCC=O\n");
    let out = path(dir.path(), "model");
    let o = graphbpe(&["mine", "--corpus", &corpus, "-k", "2", "--out", &out]);
    assert!(o.status.success());
    let ops = fs::read_to_string(dir.path().join("model/ops.txt")).unwrap();
    assert_eq!(ops, "graphbpe-ops v1 K=2\n0\tCN\t3\n1\tCC\t2\n");

    let query = write(dir.path(), "q.smi", "CCN\tmol1\n");
    let ops = path(dir.path(), "model/ops.txt");
    let o = graphbpe(&["fragmentize", "--corpus", &query, "--ops", &ops]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "mol1\tC|CN\n");

    let traj = path(dir.path(), "t.jsonl");
    let o = graphbpe(&["fragmentize", "--corpus", &query, "--ops", &ops, "--motifs", "--trajectories", &traj]);
    assert_eq!(stdout(&o), "mol1\t*C|*CN\n");
    assert_eq!(
        fs::read_to_string(&traj).unwrap(),
        "{\"start\":\"*CN\",\"steps\":[{\"focus\":0,\"attach\":{\"motif\":\"*C\",\"site\":0}}]}\n"
    );
}

#[test]
fn aromatic_corpus_learns_ring_patterns() {
    let dir = TempDir::new().unwrap();
    let corpus = write(dir.path(), "c.smi", "Brc1ccccc1\nCc1cccc(O)c1\n");
    let out = path(dir.path(), "m");
    assert!(graphbpe(&["mine", "--corpus", &corpus, "-k", "3", "--out", &out]).status.success());
    let ops = fs::read_to_string(dir.path().join("m/ops.txt")).unwrap();
    let patterns: Vec<&str> = ops.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(&patterns[..2], ["c:c", "c:c:c:c"]);
    let o = graphbpe(&["inspect-vocab", "--vocab", &path(dir.path(), "m/vocab.txt")]);
    assert!(o.status.success());
    let listing = stdout(&o);
    assert!(listing.starts_with("5 motifs\n"), "{listing}");
    assert!(listing.contains("*c1ccccc1"));
}

#[test]
fn empty_inputs() {
    let dir = TempDir::new().unwrap();
    let corpus = write(dir.path(), "c.smi", "");
    let out = path(dir.path(), "m");
    assert!(graphbpe(&["mine", "--corpus", &corpus, "-k", "0", "--out", &out]).status.success());
    let o = graphbpe(&["fragmentize", "--corpus", &corpus, "--ops", &path(dir.path(), "m/ops.txt")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "");
    let o = graphbpe(&["inspect-vocab", "--vocab", &path(dir.path(), "m/vocab.txt")]);
    assert_eq!(stdout(&o), "0 motifs\n");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write(dir.path(), "good.smi", "CCO\n");
    let bad = write(dir.path(), "bad.smi", "CCO\nC1CC\n");
    let out = path(dir.path(), "m");

    assert_eq!(graphbpe(&["mine", "--corpus", &good]).status.code(), Some(2));
    assert_eq!(graphbpe(&["frobnicate"]).status.code(), Some(2));

    let o = graphbpe(&["mine", "--corpus", &bad, "-k", "1", "--out", &out]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let corrupt = write(dir.path(), "ops.txt", "graphbpe-ops v9 K=0\n");
    let o = graphbpe(&["fragmentize", "--corpus", &good, "--ops", &corrupt]);
    assert_eq!(o.status.code(), Some(4));

    let tampered = write(
        dir.path(),
        "vocab.txt",
        "graphbpe-vocab v1\n*C\t3\t0@0-\n*CC\t1\t0@0=\n",
    );
    let o = graphbpe(&["inspect-vocab", "--vocab", &tampered]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let missing = path(dir.path(), "nope.smi");
    assert_eq!(graphbpe(&["mine", "--corpus", &missing, "-k", "1", "--out", &out]).status.code(), Some(1));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let corpus = write(
        dir.path(),
        "c.smi",
        "CC(=O)Nc1ccc(O)cc1\nc1ccccc1O\nCCN(CC)CC\nO=C(O)c1ccccc1\nC1CCC2CCCCC2C1\nClc1ccc(Br)cc1\nCC#N\nc1ccncc1\n",
    );
    let mut runs = Vec::new();
    for threads in ["1", "4", "4"] {
        let out = path(dir.path(), &format!("m{threads}{}", runs.len()));
        assert!(graphbpe(&["--threads", threads, "mine", "--corpus", &corpus, "-k", "20", "--out", &out]).status.success());
        let vocab = format!("{out}/vocab.txt");
        let o = graphbpe(&["--threads", threads, "generate", "--vocab", &vocab, "-n", "200", "--seed", "3"]);
        assert!(o.status.success());
        let artifacts: Vec<String> = ["ops.txt", "vocab.txt", "attach.txt"]
            .iter()
            .map(|f| fs::read_to_string(Path::new(&out).join(f)).unwrap())
            .collect();
        runs.push((artifacts, stdout(&o)));
    }
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    assert!(runs[0].1.lines().count() > 0);
}

#[test]
fn eval_report() {
    let dir = TempDir::new().unwrap();
    let train = write(dir.path(), "train.smi", "CCO\nc1ccccc1\nCC(=O)O\n");
    let gen = write(dir.path(), "gen.smi", "OCC\nc1ccccc1\nCC(=O)O\n");
    let report = path(dir.path(), "report.txt");
    assert!(graphbpe(&["eval", "--generated", &gen, "--train", &train, "--report", &report]).status.success());
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.contains("validity=1.000000"));
    assert!(text.contains("novelty=0.000000"));
    assert!(text.contains("uniqueness=1.000000"));
    assert!(text.contains("kl_div_score="));
}
