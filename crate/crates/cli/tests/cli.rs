use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dsm_core::container;
use dsm_core::sparse::Csr;
use dsm_core::weighting::{Scheme, WeightedMatrix};
use dsm_core::{Pos, Vocabulary, Word};
use flate2::write::GzEncoder;
use tempfile::TempDir;

fn dsm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsm")).args(args).output().expect("run dsm")
}

fn ok(args: &[&str]) -> String {
    let out = dsm(args);
    assert!(
        out.status.success(),
        "dsm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Value of `key=` in a tab- or space-separated status line.
fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split(['\t', ' '])
        .find_map(|f| f.trim().strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from {line:?}"))
}

const TINY: &str = "a_NN b_NN c_NN\nthe_DT a_NN b_VB\n";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture { dir: TempDir::new().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn write_gz(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        let mut enc = GzEncoder::new(std::fs::File::create(&p).unwrap(), flate2::Compression::default());
        enc.write_all(text.as_bytes()).unwrap();
        enc.finish().unwrap();
        p
    }
}

#[test]
fn build_counts_on_tiny_plain_gzip_and_empty() {
    let f = Fixture::new();
    let plain = f.write("tiny.txt", TINY);
    let gz = f.write_gz("tiny.txt.gz", TINY);
    let empty = f.write("empty.txt", "");
    // sentence 1 (window 2): all 6 ordered pairs of a,b,c; sentence 2 after filtering: a_N b_V, 2 pairs
    let line = ok(&["build", s(&plain), "-o", s(&f.path("m.dsm")), "--min-context-freq", "0"]);
    assert_eq!(field(&line, "total"), "8");
    assert_eq!(field(&line, "rows"), "4");
    assert_eq!(field(&line, "nnz"), "8");
    let line_gz = ok(&["build", s(&gz), "-o", s(&f.path("g.dsm")), "--min-context-freq", "0"]);
    assert_eq!(field(&line_gz, "total"), "8");
    assert_eq!(field(&line_gz, "nnz"), "8");
    let line = ok(&["build", s(&empty), "-o", s(&f.path("e.dsm")), "--min-context-freq", "0"]);
    assert_eq!(field(&line, "total"), "0");
    assert_eq!(field(&line, "rows"), "0");
    // an empty model is still a valid input downstream
    ok(&["weight", s(&f.path("e.dsm")), "-o", s(&f.path("ew.dsm"))]);
    let m = container::load_counts(&f.path("e.dsm")).unwrap();
    assert_eq!(m.nnz(), 0);
}

#[test]
fn reruns_are_byte_identical() {
    let f = Fixture::new();
    let corpus = f.write("c.txt", &TINY.repeat(20));
    let run = |tag: &str| {
        let c = f.path(&format!("c{tag}.dsm"));
        let w = f.path(&format!("w{tag}.dsm"));
        let d = f.path(&format!("d{tag}.dsm"));
        ok(&["build", s(&corpus), "-o", s(&c), "--min-context-freq", "0"]);
        ok(&["weight", s(&c), "-o", s(&w), "--scheme", "ppmi"]);
        ok(&["svd", s(&w), "-o", s(&d), "--k", "2", "--seed", "7"]);
        [c, w, d].map(|p| std::fs::read(p).unwrap())
    };
    assert_eq!(run("1"), run("2"));
}

#[test]
fn config_fingerprints_gate_each_stage() {
    let f = Fixture::new();
    let corpus = f.write("c.txt", &TINY.repeat(5));
    let conf = f.write(
        "grid.conf",
        &format!("corpus = {}\nwindow = 2\nmin_context_freq = 0\nscheme = lmi\n", corpus.display()),
    );
    let other = f.write(
        "other.conf",
        &format!("corpus = {}\nwindow = 3\nmin_context_freq = 0\nscheme = lmi\n", corpus.display()),
    );
    let (c, w) = (f.path("c.dsm"), f.path("w.dsm"));
    ok(&["--config", s(&conf), "build", "-o", s(&c)]);
    ok(&["weight", "--config", s(&conf), s(&c), "-o", s(&w)]);
    let stored = container::load_weighted(&w).unwrap();
    assert_eq!(stored.scheme(), Scheme::Lmi);
    let out = dsm(&["weight", "--config", s(&other), s(&c), "-o", s(&f.path("x.dsm"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fingerprint mismatch"));
    // flags override the file, and so change the expected fingerprint
    let out = dsm(&["weight", "--config", s(&conf), "--window", "5", s(&c), "-o", s(&f.path("y.dsm"))]);
    assert_eq!(out.status.code(), Some(1));
    ok(&["sim", "--config", s(&conf), s(&w), "a_N", "b_N"]);
}

#[test]
fn invalid_settings_exit_one() {
    let f = Fixture::new();
    let corpus = f.write("c.txt", TINY);
    let out = dsm(&["build", s(&corpus), "-o", s(&f.path("m.dsm")), "--window", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let out = dsm(&["build", s(&f.path("missing.txt")), "-o", s(&f.path("m.dsm"))]);
    assert_eq!(out.status.code(), Some(1));
}

/// Rows a, b, c, d over three contexts with the weights of the classic toy vectors.
fn toy_model(path: &Path) {
    let rows = [
        ("a", [1.0, 2.0, 0.0]),
        ("b", [0.0, 1.0, 0.0]),
        ("c", [2.0, 1.0, 0.0]),
        ("d", [1.0, 2.0, 1.0]),
    ];
    let mut words: Vec<(Word, u64)> = rows.iter().map(|(l, _)| (Word::new(*l, Pos::N), 10)).collect();
    words.extend(["f1", "f2", "f3"].map(|l| (Word::new(l, Pos::N), 10)));
    let vocab = Vocabulary::from_counts(words, 0);
    let mut trip = Vec::new();
    for (r, (_, v)) in rows.iter().enumerate() {
        for (c, &x) in v.iter().enumerate() {
            if x > 0.0 {
                trip.push((r as u32, c as u32, x));
            }
        }
    }
    let m = WeightedMatrix::from_parts(
        vocab,
        vec![0, 1, 2, 3],
        vec![4, 5, 6],
        Csr::from_sorted_triplets(4, 3, trip),
        Scheme::Ppmi,
    );
    container::save_weighted(&m, path).unwrap();
}

#[test]
fn toy_cosines_through_the_cli() {
    let f = Fixture::new();
    let model = f.path("toy.dsm");
    toy_model(&model);
    let score = |a: &str, b: &str| -> f64 {
        let line = ok(&["sim", s(&model), a, b]);
        line.trim().rsplit('\t').next().unwrap().parse().unwrap()
    };
    assert!((score("a_N", "b_N") - 0.8944).abs() < 1e-4);
    assert!((score("a", "c") - 0.8000).abs() < 1e-4);
    assert!((score("a_N", "d_N") - 5.0 / 30f64.sqrt()).abs() < 1e-6);
    assert_eq!(score("d_N", "d_N"), 1.0);
    let out = dsm(&["sim", s(&model), "a_N", "zebra_N"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zebra_N"));
    // APSyn over the same weights, N within the accepted grid
    let line = ok(&["sim", s(&model), "a_N", "d_N", "--measure", "apsyn", "--apsyn-n", "100"]);
    let v: f64 = line.trim().rsplit('\t').next().unwrap().parse().unwrap();
    assert!((v - 1.5).abs() < 1e-6);
    let nn = ok(&["neighbors", s(&model), "a_N", "--top", "2"]);
    let lines: Vec<&str> = nn.lines().collect();
    assert_eq!(lines[0], "rank,neighbor,score");
    assert!(lines[1].starts_with("1,d_N,"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn eval_fixture_and_coverage() {
    let f = Fixture::new();
    let model = f.path("toy.dsm");
    toy_model(&model);
    // gold follows the cosine order a-d > a-b > a-c > b-c, plus one OOV pair
    let ds = f.write("ws.txt", "Word 1,Word 2,Human (mean)\na,d,9\na,b,7\na,c,6\nb,c,2\na,zebra,5\n");
    let (csv, json) = (f.path("r.csv"), f.path("r.json"));
    let run = || {
        let line = ok(&["eval", s(&model), s(&ds), "--format", "ws353", "--out", s(&csv), "--summary", s(&json)]);
        (line, std::fs::read(&csv).unwrap(), std::fs::read(&json).unwrap())
    };
    let first = run();
    assert_eq!(field(&first.0, "rho"), "1.0000");
    assert_eq!(field(&first.0, "scored"), "4");
    assert_eq!(field(&first.0, "skipped"), "1");
    assert_eq!(first, run());
    let text = String::from_utf8(first.1).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# fingerprint="));
    assert_eq!(lines.next().unwrap(), "word1,pos1,word2,pos2,gold,score,skipped,note");
    assert_eq!(lines.count(), 5);
    let summary: serde_json::Value = serde_json::from_slice(&first.2).unwrap();
    assert_eq!(summary["n_pairs"], 5);
    assert!((summary["coverage"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    let none = f.write("none.txt", "x,y,1\ny,z,2\n");
    let out = dsm(&["eval", s(&model), s(&none), "--format", "ws353"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hubness_row_accounting() {
    let f = Fixture::new();
    let model = f.path("toy.dsm");
    toy_model(&model);
    let q = f.write("q.txt", "a_N\nb\nghost_N\n");
    let (out, summary) = (f.path("h.csv"), f.path("hs.csv"));
    let line = ok(&["hubness", s(&model), s(&q), "-K", "2", "--out", s(&out), "--summary", s(&summary)]);
    assert_eq!(field(&line, "skipped"), "1");
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2 * 2);
    let text = std::fs::read_to_string(&summary).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "nn_rank,mean_freq_rank,n");
    assert_eq!(text.lines().count(), 2 + 2);
}
