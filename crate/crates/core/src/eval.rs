//! Word-similarity benchmark evaluation.
//!
//! Supported upstream formats, one example line each:
//!
//! | format        | example line | POS |
//! |---------------|--------------|-----|
//! | `ws353`       | `tiger<TAB>cat<TAB>7.35` (tab, comma or space separated) | none |
//! | `men`         | `dog-n cat-n 42.000000` | `-n -v -j` suffix |
//! | `men-natural` | `dog cat 42.000000` | none |
//! | `simlex`      | `old<TAB>new<TAB>A<TAB>1.58<TAB>2.72<TAB>...` (score in column 4) | `A N V` in column 3 |
//!
//! A first line without a numeric score (`word1 ...`, `Word 1,Word 2,Human (mean)`) is taken as a header.
//! The WordSim-353 similarity/relatedness subsets use the `ws353` format.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::similarity::{pair_similarity, Measure, SimParams, Space};
use crate::vocab::{Pos, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetFormat {
    Ws353,
    /// MEN lemma form with `-n`/`-v`/`-j` suffixes.
    Men,
    MenNatural,
    Simlex,
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetFormat::Ws353 => "ws353",
            DatasetFormat::Men => "men",
            DatasetFormat::MenNatural => "men-natural",
            DatasetFormat::Simlex => "simlex",
        })
    }
}

impl FromStr for DatasetFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ws353" | "wordsim" | "wordsim353" => Ok(DatasetFormat::Ws353),
            "men" => Ok(DatasetFormat::Men),
            "men-natural" => Ok(DatasetFormat::MenNatural),
            "simlex" | "simlex999" => Ok(DatasetFormat::Simlex),
            _ => Err(Error::config(format!(
                "dataset format must be ws353|men|men-natural|simlex, got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalPair {
    pub word1: String,
    pub word2: String,
    pub pos1: Option<Pos>,
    pub pos2: Option<Pos>,
    pub gold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalDataset {
    pub name: String,
    pub pairs: Vec<EvalPair>,
}

impl EvalDataset {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Every distinct word of the dataset, with its POS when the format gives one.
    pub fn words(&self) -> Vec<(String, Option<Pos>)> {
        let mut seen = std::collections::BTreeSet::new();
        for p in &self.pairs {
            seen.insert((p.word1.clone(), p.pos1));
            seen.insert((p.word2.clone(), p.pos2));
        }
        seen.into_iter().collect()
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    let fields: Vec<&str> = if line.contains('\t') {
        line.split('\t').collect()
    } else if line.contains(',') {
        line.split(',').collect()
    } else {
        line.split_whitespace().collect()
    };
    fields.into_iter().map(str::trim).filter(|f| !f.is_empty()).collect()
}

fn men_word(raw: &str) -> Option<(String, Pos)> {
    let (lemma, suffix) = raw.rsplit_once('-')?;
    let pos = match suffix {
        "n" => Pos::N,
        "v" => Pos::V,
        "j" | "a" => Pos::J,
        _ => return None,
    };
    (!lemma.is_empty()).then(|| (lemma.to_lowercase(), pos))
}

fn simlex_pos(raw: &str) -> Option<Pos> {
    match raw {
        "A" | "a" | "J" | "j" => Some(Pos::J),
        "N" | "n" => Some(Pos::N),
        "V" | "v" => Some(Pos::V),
        _ => None,
    }
}

fn parse_line(fields: &[&str], format: DatasetFormat) -> std::result::Result<EvalPair, String> {
    let gold_at = match format {
        DatasetFormat::Simlex => 3,
        _ => 2,
    };
    if fields.len() <= gold_at {
        return Err(format!("expected at least {} fields, found {}", gold_at + 1, fields.len()));
    }
    let gold: f64 = fields[gold_at]
        .parse()
        .map_err(|_| format!("gold score {:?} is not a number", fields[gold_at]))?;
    if !gold.is_finite() {
        return Err(format!("gold score {gold} is not finite"));
    }
    let (w1, w2) = (fields[0], fields[1]);
    let pair = match format {
        DatasetFormat::Ws353 | DatasetFormat::MenNatural => EvalPair {
            word1: w1.to_lowercase(),
            word2: w2.to_lowercase(),
            pos1: None,
            pos2: None,
            gold,
        },
        DatasetFormat::Men => {
            let (l1, p1) = men_word(w1).ok_or_else(|| format!("{w1:?} lacks a -n/-v/-j suffix"))?;
            let (l2, p2) = men_word(w2).ok_or_else(|| format!("{w2:?} lacks a -n/-v/-j suffix"))?;
            EvalPair {
                word1: l1,
                word2: l2,
                pos1: Some(p1),
                pos2: Some(p2),
                gold,
            }
        }
        DatasetFormat::Simlex => {
            let pos = simlex_pos(fields[2]).ok_or_else(|| format!("unknown SimLex POS {:?}", fields[2]))?;
            EvalPair {
                word1: w1.to_lowercase(),
                word2: w2.to_lowercase(),
                pos1: Some(pos),
                pos2: Some(pos),
                gold,
            }
        }
    };
    Ok(pair)
}

/// A first line whose score column is not a number.
fn is_header(fields: &[&str], format: DatasetFormat) -> bool {
    let gold_at = if format == DatasetFormat::Simlex { 3 } else { 2 };
    fields.get(gold_at).is_none_or(|g| g.parse::<f64>().is_err())
}

pub fn parse_dataset(text: &str, format: DatasetFormat, name: &str, origin: &Path) -> Result<EvalDataset> {
    let mut pairs = Vec::new();
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        if std::mem::take(&mut first) && is_header(&fields, format) {
            continue;
        }
        let pair = parse_line(&fields, format).map_err(|message| Error::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            message,
        })?;
        pairs.push(pair);
    }
    if pairs.len() < 2 {
        return Err(Error::Parse {
            path: origin.to_path_buf(),
            line: 0,
            message: format!("dataset holds {} pairs; at least 2 are needed", pairs.len()),
        });
    }
    Ok(EvalDataset {
        name: name.to_string(),
        pairs,
    })
}

pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<EvalDataset> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| format.to_string());
    parse_dataset(&text, format, &name, path)
}

/// WordSim-353 similarity or relatedness subset file.
pub fn load_subset(path: &Path) -> Result<EvalDataset> {
    load_dataset(path, DatasetFormat::Ws353)
}

/// 1-based ranks; tied values share the mean of the positions they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = mean;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::UndefinedCorrelation(format!(
            "length mismatch ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than 2 observations".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite value".into()));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
        .ok_or_else(|| Error::UndefinedCorrelation("constant input".into()))
}

/// POS backoff order for dataset words that carry no tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosPolicy {
    pub order: Vec<Pos>,
}

impl Default for PosPolicy {
    fn default() -> Self {
        PosPolicy {
            order: vec![Pos::N, Pos::V, Pos::J],
        }
    }
}

impl fmt::Display for PosPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order.as_slice() {
            [Pos::N, Pos::V, Pos::J] => f.write_str("noun-first"),
            [Pos::V, Pos::N, Pos::J] => f.write_str("verb-first"),
            [Pos::J, Pos::N, Pos::V] => f.write_str("adjective-first"),
            other => f.write_str(&other.iter().map(|p| p.as_char()).collect::<String>()),
        }
    }
}

/// `noun-first`, `verb-first`, `adjective-first`, or an explicit order such as `NJV`.
impl FromStr for PosPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let order = match s {
            "noun-first" => vec![Pos::N, Pos::V, Pos::J],
            "verb-first" => vec![Pos::V, Pos::N, Pos::J],
            "adjective-first" | "adj-first" => vec![Pos::J, Pos::N, Pos::V],
            other => {
                let order: Vec<Pos> = other
                    .chars()
                    .map(|c| c.to_string().parse::<Pos>())
                    .collect::<Result<_>>()
                    .map_err(|_| Error::config(format!("unknown pos policy {s:?}")))?;
                if order.is_empty() || order.contains(&Pos::O) {
                    return Err(Error::config(format!("unknown pos policy {s:?}")));
                }
                order
            }
        };
        Ok(PosPolicy { order })
    }
}

impl PosPolicy {
    /// The first candidate in backoff order that has a vector; `None` if none does.
    pub fn resolve(&self, space: &Space, lemma: &str) -> Option<Pos> {
        self.order
            .iter()
            .copied()
            .find(|&p| space.has_vector(&Word::new(lemma, p)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OovPolicy {
    /// Unscorable pairs are left out of the correlation and counted.
    #[default]
    Skip,
    /// Unscorable pairs score 0.
    Zero,
}

impl fmt::Display for OovPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OovPolicy::Skip => "skip",
            OovPolicy::Zero => "zero",
        })
    }
}

impl FromStr for OovPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skip" => Ok(OovPolicy::Skip),
            "zero" => Ok(OovPolicy::Zero),
            _ => Err(Error::config(format!("oov policy must be skip|zero, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairOutcome {
    pub word1: String,
    pub pos1: Option<Pos>,
    pub word2: String,
    pub pos2: Option<Pos>,
    pub gold: f64,
    pub score: Option<f64>,
    pub skipped: bool,
    /// Why the pair was not scored normally, or which POS the backoff chose.
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub dataset: String,
    pub measure: Measure,
    pub rho: f64,
    pub n_scored: usize,
    pub n_skipped: usize,
    /// Pairs that could not be scored, whatever the OOV policy did with them.
    pub n_unscorable: usize,
    pub per_pair: Vec<PairOutcome>,
}

fn resolve_word(space: &Space, lemma: &str, pos: Option<Pos>, policy: &PosPolicy, notes: &mut Vec<String>) -> Option<Word> {
    match pos {
        Some(p) => Some(Word::new(lemma, p)),
        None => {
            let p = policy.resolve(space, lemma);
            if let Some(p) = p {
                notes.push(format!("{lemma}->{p}"));
            }
            p.map(|p| Word::new(lemma, p))
        }
    }
}

fn score_pair(space: &Space, pair: &EvalPair, measure: Measure, params: &SimParams, policy: &PosPolicy) -> Result<PairOutcome> {
    let mut notes = Vec::new();
    let w1 = resolve_word(space, &pair.word1, pair.pos1, policy, &mut notes);
    let w2 = resolve_word(space, &pair.word2, pair.pos2, policy, &mut notes);
    let mut outcome = PairOutcome {
        word1: pair.word1.clone(),
        pos1: w1.as_ref().map(|w| w.pos),
        word2: pair.word2.clone(),
        pos2: w2.as_ref().map(|w| w.pos),
        gold: pair.gold,
        score: None,
        skipped: true,
        note: String::new(),
    };
    let (Some(w1), Some(w2)) = (w1, w2) else {
        let missing = if outcome.pos1.is_none() { &pair.word1 } else { &pair.word2 };
        outcome.note = format!("oov:{missing}");
        return Ok(outcome);
    };
    match pair_similarity(space, &w1, &w2, measure, params) {
        Ok(s) => {
            outcome.score = Some(s.value);
            outcome.skipped = false;
            outcome.note = notes.join(";");
        }
        Err(Error::OutOfVocabulary(w)) => outcome.note = format!("oov:{w}"),
        Err(Error::UndefinedSimilarity(w)) => outcome.note = format!("zero-vector:{w}"),
        Err(e) => return Err(e),
    }
    Ok(outcome)
}

/// Scores every pair and correlates model scores with gold scores.
pub fn evaluate(
    space: &Space,
    dataset: &EvalDataset,
    measure: Measure,
    params: &SimParams,
    pos_policy: &PosPolicy,
    oov_policy: OovPolicy,
) -> Result<EvalResult> {
    let mut per_pair: Vec<PairOutcome> = dataset
        .pairs
        .par_iter()
        .map(|p| score_pair(space, p, measure, params, pos_policy))
        .collect::<Result<_>>()?;
    let n_unscorable = per_pair.iter().filter(|p| p.skipped).count();
    if oov_policy == OovPolicy::Zero {
        for p in per_pair.iter_mut().filter(|p| p.skipped) {
            p.score = Some(0.0);
            p.skipped = false;
        }
    }
    let (scores, golds): (Vec<f64>, Vec<f64>) = per_pair
        .iter()
        .filter_map(|p| p.score.map(|s| (s, p.gold)))
        .unzip();
    if scores.len() < 2 {
        return Err(Error::Evaluation(format!(
            "{}: only {} of {} pairs could be scored",
            dataset.name,
            scores.len(),
            dataset.len()
        )));
    }
    let rho = spearman(&scores, &golds)?;
    let n_scored = scores.len();
    Ok(EvalResult {
        dataset: dataset.name.clone(),
        measure,
        rho,
        n_scored,
        n_skipped: dataset.len() - n_scored,
        n_unscorable,
        per_pair,
    })
}

/// Per-pair audit CSV, preceded by a `# fingerprint=...` comment line.
pub fn write_results_csv(result: &EvalResult, fingerprint: &str, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(file, "# fingerprint={fingerprint}").map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let io = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(["word1", "pos1", "word2", "pos2", "gold", "score", "skipped", "note"])
        .map_err(io)?;
    let pos = |p: Option<Pos>| p.map(|p| p.to_string()).unwrap_or_default();
    for p in &result.per_pair {
        w.write_record([
            p.word1.clone(),
            pos(p.pos1),
            p.word2.clone(),
            pos(p.pos2),
            p.gold.to_string(),
            p.score.map(|s| s.to_string()).unwrap_or_default(),
            p.skipped.to_string(),
            p.note.clone(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalSummary {
    pub dataset: String,
    pub measure: String,
    pub rho: f64,
    pub n_pairs: usize,
    pub n_scored: usize,
    pub n_skipped: usize,
    pub n_unscorable: usize,
    pub coverage: f64,
    pub fingerprint: String,
    pub config: BTreeMap<String, String>,
}

impl EvalSummary {
    pub fn new(result: &EvalResult, fingerprint: &str, config: BTreeMap<String, String>) -> Self {
        let n_pairs = result.per_pair.len();
        EvalSummary {
            dataset: result.dataset.clone(),
            measure: result.measure.to_string(),
            rho: result.rho,
            n_pairs,
            n_scored: result.n_scored,
            n_skipped: result.n_skipped,
            n_unscorable: result.n_unscorable,
            coverage: (n_pairs - result.n_unscorable) as f64 / n_pairs as f64,
            fingerprint: fingerprint.to_string(),
            config,
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::Csr;
    use crate::vocab::Vocabulary;
    use crate::weighting::{Scheme, WeightedMatrix};
    use approx::assert_abs_diff_eq;

    fn parse(text: &str, f: DatasetFormat) -> Result<EvalDataset> {
        parse_dataset(text, f, "t", Path::new("t.txt"))
    }

    #[test]
    fn loaders() {
        let s = parse(
            "word1\tword2\tPOS\tSimLex999\tconc(w1)\nold\tnew\tA\t1.58\t2.72\nsmart\tintelligent\tA\t9.2\t1.75\n",
            DatasetFormat::Simlex,
        )
        .unwrap();
        assert_eq!(
            s.pairs[0],
            EvalPair {
                word1: "old".into(),
                word2: "new".into(),
                pos1: Some(Pos::J),
                pos2: Some(Pos::J),
                gold: 1.58
            }
        );
        let m = parse("dog-n cat-n 42\nrun-v walk-v 30.5\n", DatasetFormat::Men).unwrap();
        assert_eq!(m.pairs[0].word1, "dog");
        assert_eq!(m.pairs[0].pos2, Some(Pos::N));
        assert_eq!(m.pairs[0].gold, 42.0);
        assert_eq!(m.pairs[1].pos1, Some(Pos::V));
        let w = parse("Word 1,Word 2,Human (mean)\nTiger,cat,7.35\nbook,library,7.46\n", DatasetFormat::Ws353).unwrap();
        assert_eq!(w.pairs[0].word1, "tiger");
        assert_eq!(w.pairs[0].pos1, None);
        assert_eq!(w.pairs[0].gold, 7.35);
        let w = parse("tiger\tcat\t7.35\ntiger tiger 10\n", DatasetFormat::Ws353).unwrap();
        assert_eq!(w.len(), 2);
        let n = parse("sun sunlight 50.000000\nsky sun 30\n", DatasetFormat::MenNatural).unwrap();
        assert_eq!(n.pairs[0].pos1, None);
    }

    #[test]
    fn loader_errors_carry_line_numbers() {
        match parse("a b 1\nc d x\n", DatasetFormat::Ws353) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse("dog cat-n 4\ncat dog-n 4\n", DatasetFormat::Men).is_err());
        assert!(parse("old new X 1.0\nold new A 1.0\n", DatasetFormat::Simlex).is_err());
        assert!(parse("", DatasetFormat::Ws353).is_err());
        assert!(parse("a b 1\n", DatasetFormat::Ws353).is_err());
        assert!(parse("a b inf\nc d 1\n", DatasetFormat::Ws353).is_err());
    }

    #[test]
    fn spearman_examples() {
        assert_abs_diff_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0, epsilon = 1e-15);
        // average ranks [1, 2.5, 2.5, 4] vs [1, 3, 2, 4]: 4.5 / sqrt(4.5 * 5)
        assert_abs_diff_eq!(
            spearman(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap(),
            4.5 / (22.5f64).sqrt(),
            epsilon = 1e-12
        );
        assert!(matches!(spearman(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::UndefinedCorrelation(_))));
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    fn space() -> Space {
        // w and u are orthogonal; w_N exists, "bank" only as a verb
        let words = vec![
            (Word::new("w", Pos::N), 5),
            (Word::new("u", Pos::N), 5),
            (Word::new("bank", Pos::V), 5),
            (Word::new("bank", Pos::J), 5),
        ];
        let vocab = Vocabulary::from_counts(words, 0);
        let id = |l: &str, p: Pos| vocab.id(&Word::new(l, p)).unwrap();
        let mut rows = vec![id("w", Pos::N), id("u", Pos::N), id("bank", Pos::V), id("bank", Pos::J)];
        rows.sort();
        let mut trip = Vec::new();
        for (r, &wid) in rows.iter().enumerate() {
            let c = match vocab.word(wid).lemma.as_str() {
                "w" => 0,
                "u" => 1,
                _ => 2,
            };
            trip.push((r as u32, c, 1.0));
        }
        let csr = Csr::from_sorted_triplets(4, 3, trip);
        Space::sparse(WeightedMatrix::from_parts(vocab, rows, vec![0, 1, 2], csr, Scheme::Ppmi))
    }

    fn ds(pairs: &[(&str, &str, f64)]) -> EvalDataset {
        EvalDataset {
            name: "fixture".into(),
            pairs: pairs
                .iter()
                .map(|&(a, b, g)| EvalPair {
                    word1: a.into(),
                    word2: b.into(),
                    pos1: None,
                    pos2: None,
                    gold: g,
                })
                .collect(),
        }
    }

    #[test]
    fn self_pairs_rank_above_cross_pairs() {
        let d = ds(&[("w", "w", 10.0), ("u", "u", 10.0), ("w", "u", 0.0)]);
        let r = evaluate(&space(), &d, Measure::Cosine, &SimParams::default(), &PosPolicy::default(), OovPolicy::Skip).unwrap();
        // self pairs tie at 1.0 and so do their golds
        assert_abs_diff_eq!(r.rho, 1.0, epsilon = 1e-12);
        assert_eq!(r.n_scored, 3);
    }

    #[test]
    fn oov_accounting_and_backoff() {
        let d = ds(&[("w", "w", 10.0), ("u", "u", 9.0), ("w", "u", 0.0), ("w", "ghost", 3.0), ("bank", "w", 1.0)]);
        let sp = space();
        let r = evaluate(&sp, &d, Measure::Cosine, &SimParams::default(), &PosPolicy::default(), OovPolicy::Skip).unwrap();
        assert_eq!(r.n_scored + r.n_skipped, d.len());
        assert_eq!(r.n_skipped, 1);
        assert_eq!(r.per_pair[3].note, "oov:ghost");
        // noun-first backoff lands on the verb reading
        assert_eq!(r.per_pair[4].pos1, Some(Pos::V));
        assert_eq!(r.per_pair[4].note, "bank->V;w->N");
        let adj: PosPolicy = "adjective-first".parse().unwrap();
        let r2 = evaluate(&sp, &d, Measure::Cosine, &SimParams::default(), &adj, OovPolicy::Skip).unwrap();
        assert_eq!(r2.per_pair[4].pos1, Some(Pos::J));
        let z = evaluate(&sp, &d, Measure::Cosine, &SimParams::default(), &PosPolicy::default(), OovPolicy::Zero).unwrap();
        assert_eq!(z.n_skipped, 0);
        assert_eq!(z.n_unscorable, 1);
        assert_eq!(z.per_pair[3].score, Some(0.0));
        // determinism
        assert_eq!(r, evaluate(&sp, &d, Measure::Cosine, &SimParams::default(), &PosPolicy::default(), OovPolicy::Skip).unwrap());
    }

    #[test]
    fn zero_coverage_is_an_error() {
        let d = ds(&[("x", "y", 1.0), ("y", "z", 2.0)]);
        assert!(matches!(
            evaluate(&space(), &d, Measure::Cosine, &SimParams::default(), &PosPolicy::default(), OovPolicy::Skip),
            Err(Error::Evaluation(_))
        ));
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("noun-first".parse::<PosPolicy>().unwrap(), PosPolicy::default());
        assert_eq!("VJN".parse::<PosPolicy>().unwrap().order, vec![Pos::V, Pos::J, Pos::N]);
        assert!("XYZ".parse::<PosPolicy>().is_err());
        assert_eq!(PosPolicy::default().to_string(), "noun-first");
        assert!("drop".parse::<OovPolicy>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn invariant_under_monotone_transform(
                pairs in proptest::collection::vec((0i32..10, -50.0f64..50.0), 2..40)
            ) {
                let xs: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
                let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                prop_assume!(xs.iter().any(|&x| x != xs[0]) && ys.iter().any(|&y| y != ys[0]));
                let rho = spearman(&xs, &ys).unwrap();
                let tx: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
                let ty: Vec<f64> = ys.iter().map(|y| y * 3.0 + 7.0).collect();
                prop_assert!((spearman(&tx, &ty).unwrap() - rho).abs() < 1e-12);
                prop_assert!((spearman(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
                prop_assert!((-1.0..=1.0).contains(&rho));
            }
        }
    }
}
