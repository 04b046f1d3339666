//! Vocabulary construction and symmetric-window co-occurrence counting.
//!
//! Counting runs in two passes over the corpus: the first builds the
//! [`Vocabulary`], the second slides the window. Pair counts accumulate in a
//! bounded hash map that is flushed into sorted runs; runs are merged by key so
//! the result depends only on the multiset of sentences, never on their order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{content_filter, stream_sentences, Sentence, TagMap};
use crate::error::{Error, Result};
use crate::sparse::Csr;
use crate::vocab::{Vocabulary, Word, WordId};

/// Which token sequence the window slides over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WindowOver {
    /// Content words only; function words do not take up window slots.
    #[default]
    Filtered,
    /// Every token, including function words, occupies a slot.
    Surface,
}

impl FromStr for WindowOver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "filtered" => Ok(WindowOver::Filtered),
            "surface" => Ok(WindowOver::Surface),
            _ => Err(Error::config(format!("window_over must be filtered|surface, got {s:?}"))),
        }
    }
}

impl std::fmt::Display for WindowOver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WindowOver::Filtered => "filtered",
            WindowOver::Surface => "surface",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CountOptions {
    /// Tokens on each side of the target.
    pub window: usize,
    pub window_over: WindowOver,
    /// Distinct pairs held in the hash accumulator before it is flushed to a sorted run.
    pub flush_threshold: usize,
}

impl CountOptions {
    pub fn new(window: usize) -> Self {
        CountOptions {
            window,
            window_over: WindowOver::Filtered,
            flush_threshold: 1 << 22,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.window < 1 {
            return Err(Error::config("window must be at least 1"));
        }
        if self.flush_threshold < 1 {
            return Err(Error::config("flush_threshold must be at least 1"));
        }
        Ok(())
    }
}

/// Counts every content `(lemma, pos)` pair in the corpus.
pub fn build_vocab<I>(corpus: I, min_context_freq: u64) -> Vocabulary
where
    I: IntoIterator<Item = Sentence>,
{
    let mut counts = HashMap::new();
    for s in corpus {
        add_vocab_counts(&mut counts, s);
    }
    Vocabulary::from_counts(counts, min_context_freq)
}

fn add_vocab_counts(counts: &mut HashMap<Word, u64>, s: Sentence) {
    for t in s.tokens {
        if t.pos.is_content() {
            *counts.entry(Word::new(t.lemma, t.pos)).or_default() += 1;
        }
    }
}

/// Raw target × context co-occurrence counts together with the vocabulary they index.
#[derive(Clone, Debug, PartialEq)]
pub struct CooccurrenceMatrix {
    pub(crate) vocab: Vocabulary,
    /// Vocabulary id of each row, ascending.
    pub(crate) rows: Vec<WordId>,
    /// Vocabulary id of each column, ascending.
    pub(crate) cols: Vec<WordId>,
    pub(crate) counts: Csr<u64>,
    pub(crate) row_marginals: Vec<u64>,
    pub(crate) col_marginals: Vec<u64>,
    pub(crate) total: u64,
    pub(crate) window: u32,
    pub(crate) window_over: WindowOver,
    pub(crate) corpus_tokens: u64,
    /// Free-form provenance (config fingerprints and the like) carried into saved files.
    pub provenance: BTreeMap<String, String>,
}

impl CooccurrenceMatrix {
    /// Assembles a matrix from counts, deriving marginals and `D`.
    pub fn from_counts(
        vocab: Vocabulary,
        rows: Vec<WordId>,
        cols: Vec<WordId>,
        counts: Csr<u64>,
        window: u32,
        window_over: WindowOver,
        corpus_tokens: u64,
    ) -> Self {
        assert_eq!(counts.n_rows(), rows.len());
        assert_eq!(counts.n_cols(), cols.len());
        let mut row_marginals = vec![0u64; rows.len()];
        let mut col_marginals = vec![0u64; cols.len()];
        for (r, c, v) in counts.iter() {
            row_marginals[r] += v;
            col_marginals[c as usize] += v;
        }
        let total = row_marginals.iter().sum();
        CooccurrenceMatrix {
            vocab,
            rows,
            cols,
            counts,
            row_marginals,
            col_marginals,
            total,
            window,
            window_over,
            corpus_tokens,
            provenance: BTreeMap::new(),
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn rows(&self) -> &[WordId] {
        &self.rows
    }

    pub fn cols(&self) -> &[WordId] {
        &self.cols
    }

    pub fn counts(&self) -> &Csr<u64> {
        &self.counts
    }

    pub fn row_marginals(&self) -> &[u64] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[u64] {
        &self.col_marginals
    }

    /// `D`: total co-occurrence mass.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn window_over(&self) -> WindowOver {
        self.window_over
    }

    pub fn corpus_tokens(&self) -> u64 {
        self.corpus_tokens
    }

    pub fn nnz(&self) -> usize {
        self.counts.nnz()
    }

    pub fn row_of(&self, id: WordId) -> Option<usize> {
        self.rows.binary_search(&id).ok()
    }

    pub fn col_of(&self, id: WordId) -> Option<usize> {
        self.cols.binary_search(&id).ok()
    }

    /// Count for a `(target, context)` pair of words; 0 when either is absent.
    pub fn count(&self, target: &Word, context: &Word) -> u64 {
        let (Some(t), Some(c)) = (self.vocab.id(target), self.vocab.id(context)) else {
            return 0;
        };
        match (self.row_of(t), self.col_of(c)) {
            (Some(r), Some(c)) => self.counts.get(r, c as u32).unwrap_or(0),
            _ => 0,
        }
    }

    /// Checks that marginals and `D` agree with the entries and that no zero is stored.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        if self.counts.values().contains(&0) {
            return Err("explicit zero count stored".into());
        }
        let mut rm = vec![0u64; self.rows.len()];
        let mut cm = vec![0u64; self.cols.len()];
        for (r, c, v) in self.counts.iter() {
            rm[r] += v;
            cm[c as usize] += v;
        }
        if rm != self.row_marginals {
            return Err("row marginals disagree with entries".into());
        }
        if cm != self.col_marginals {
            return Err("column marginals disagree with entries".into());
        }
        if rm.iter().sum::<u64>() != self.total {
            return Err("total mass disagrees with entries".into());
        }
        if self.rows.windows(2).any(|w| w[0] >= w[1]) || self.cols.windows(2).any(|w| w[0] >= w[1]) {
            return Err("row/column id maps are not strictly ascending".into());
        }
        if self.rows.iter().chain(&self.cols).any(|&id| id as usize >= self.vocab.len()) {
            return Err("row/column id outside vocabulary".into());
        }
        Ok(())
    }
}

type Run = Vec<(u64, u64)>;

fn key(r: u32, c: u32) -> u64 {
    ((r as u64) << 32) | c as u64
}

fn merge_two(a: Run, b: Run) -> Run {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn merge_runs(mut runs: Vec<Run>) -> Run {
    // pairwise rounds keep total work at O(n log runs)
    while runs.len() > 1 {
        let mut next = Vec::with_capacity(runs.len().div_ceil(2));
        let mut it = runs.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge_two(a, b)),
                None => next.push(a),
            }
        }
        runs = next;
    }
    runs.pop().unwrap_or_default()
}

/// Per-worker accumulator; feeds on raw (unfiltered) sentences.
struct Counter<'a> {
    vocab: &'a Vocabulary,
    /// vocab id -> row index
    row_index: &'a [Option<u32>],
    /// vocab id -> column index
    col_index: &'a [Option<u32>],
    opts: &'a CountOptions,
    acc: HashMap<u64, u64>,
    runs: Vec<Run>,
    tokens: u64,
    slot_ids: Vec<Option<WordId>>,
}

impl<'a> Counter<'a> {
    fn new(
        vocab: &'a Vocabulary,
        row_index: &'a [Option<u32>],
        col_index: &'a [Option<u32>],
        opts: &'a CountOptions,
    ) -> Self {
        Counter {
            vocab,
            row_index,
            col_index,
            opts,
            acc: HashMap::new(),
            runs: Vec::new(),
            tokens: 0,
            slot_ids: Vec::new(),
        }
    }

    fn feed(&mut self, s: &Sentence) {
        self.tokens += s.len() as u64;
        self.slot_ids.clear();
        for t in &s.tokens {
            if !t.pos.is_content() {
                if self.opts.window_over == WindowOver::Surface {
                    self.slot_ids.push(None);
                }
                continue;
            }
            // content words missing from the vocabulary still occupy their slot
            let id = self.vocab.id(&Word::new(t.lemma.clone(), t.pos));
            self.slot_ids.push(id);
        }
        let n = self.slot_ids.len();
        let w = self.opts.window;
        for i in 0..n {
            let Some(row) = self.slot_ids[i].and_then(|id| self.row_index[id as usize]) else {
                continue;
            };
            let lo = i.saturating_sub(w);
            let hi = (i + w).min(n - 1);
            for j in lo..=hi {
                if j == i {
                    continue;
                }
                if let Some(col) = self.slot_ids[j].and_then(|id| self.col_index[id as usize]) {
                    *self.acc.entry(key(row, col)).or_default() += 1;
                }
            }
            if self.acc.len() >= self.opts.flush_threshold {
                self.flush();
            }
        }
    }

    fn flush(&mut self) {
        if self.acc.is_empty() {
            return;
        }
        let mut run: Run = self.acc.drain().collect();
        run.sort_unstable_by_key(|e| e.0);
        self.runs.push(run);
        if self.runs.len() >= 8 {
            let runs = std::mem::take(&mut self.runs);
            self.runs.push(merge_runs(runs));
        }
    }

    fn finish(mut self) -> (Run, u64) {
        self.flush();
        (merge_runs(self.runs), self.tokens)
    }
}

struct Layout {
    rows: Vec<WordId>,
    cols: Vec<WordId>,
    row_index: Vec<Option<u32>>,
    col_index: Vec<Option<u32>>,
}

fn layout(vocab: &Vocabulary, targets: Option<&HashSet<WordId>>) -> Layout {
    let rows: Vec<WordId> = (0..vocab.len() as WordId)
        .filter(|id| targets.is_none_or(|t| t.contains(id)))
        .collect();
    let cols: Vec<WordId> = vocab.context_ids().collect();
    let mut row_index = vec![None; vocab.len()];
    for (i, &id) in rows.iter().enumerate() {
        row_index[id as usize] = Some(i as u32);
    }
    let mut col_index = vec![None; vocab.len()];
    for (i, &id) in cols.iter().enumerate() {
        col_index[id as usize] = Some(i as u32);
    }
    Layout {
        rows,
        cols,
        row_index,
        col_index,
    }
}

fn assemble(vocab: Vocabulary, layout: Layout, run: Run, opts: &CountOptions, tokens: u64) -> CooccurrenceMatrix {
    let csr = Csr::from_sorted_triplets(
        layout.rows.len(),
        layout.cols.len(),
        run.into_iter().map(|(k, v)| ((k >> 32) as u32, k as u32, v)),
    );
    CooccurrenceMatrix::from_counts(
        vocab,
        layout.rows,
        layout.cols,
        csr,
        opts.window as u32,
        opts.window_over,
        tokens,
    )
}

/// Counts co-occurrences of target rows with context-eligible columns.
///
/// `targets` restricts the rows; `None` makes every vocabulary word a target.
/// Sentences are passed unfiltered; [`CountOptions::window_over`] decides how
/// function words interact with the window.
pub fn count_cooccurrences<I>(
    corpus: I,
    vocab: Vocabulary,
    opts: &CountOptions,
    targets: Option<&HashSet<WordId>>,
) -> Result<CooccurrenceMatrix>
where
    I: IntoIterator<Item = Sentence>,
{
    opts.validate()?;
    let layout = layout(&vocab, targets);
    let (run, tokens) = {
        let mut counter = Counter::new(&vocab, &layout.row_index, &layout.col_index, opts);
        for s in corpus {
            counter.feed(&s);
        }
        counter.finish()
    };
    Ok(assemble(vocab, layout, run, opts, tokens))
}

/// Which words become matrix rows.
#[derive(Clone, Debug, Default)]
pub enum TargetSpec {
    #[default]
    All,
    /// Listed words; entries without a POS match every POS of that lemma.
    Words(Vec<(String, Option<crate::vocab::Pos>)>),
}

impl TargetSpec {
    /// Reads one target per line, either `lemma_P` or a bare lemma.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut words = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.parse::<Word>() {
                Ok(w) => words.push((w.lemma, Some(w.pos))),
                Err(_) if !line.contains(char::is_whitespace) => words.push((line.to_lowercase(), None)),
                Err(e) => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: i + 1,
                        message: e.to_string(),
                    })
                }
            }
        }
        Ok(TargetSpec::Words(words))
    }

    pub fn resolve(&self, vocab: &Vocabulary) -> Option<HashSet<WordId>> {
        match self {
            TargetSpec::All => None,
            TargetSpec::Words(list) => {
                let wanted: HashSet<(&str, Option<crate::vocab::Pos>)> =
                    list.iter().map(|(l, p)| (l.as_str(), *p)).collect();
                Some(
                    vocab
                        .words()
                        .iter()
                        .enumerate()
                        .filter(|(_, w)| {
                            wanted.contains(&(w.lemma.as_str(), Some(w.pos))) || wanted.contains(&(w.lemma.as_str(), None))
                        })
                        .map(|(i, _)| i as WordId)
                        .collect(),
                )
            }
        }
    }
}

/// Runs both passes over a set of corpus files, one worker per file.
pub fn build_from_files(
    paths: &[PathBuf],
    tagmap: &TagMap,
    min_context_freq: u64,
    opts: &CountOptions,
    targets: &TargetSpec,
) -> Result<CooccurrenceMatrix> {
    opts.validate()?;
    let partial: Vec<HashMap<Word, u64>> = paths
        .par_iter()
        .map(|p| {
            let mut counts = HashMap::new();
            for s in stream_sentences(p, tagmap)? {
                add_vocab_counts(&mut counts, content_filter(s?));
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;
    let vocab = Vocabulary::from_counts(partial.into_iter().flatten(), min_context_freq);
    log::info!(
        "vocabulary: {} content words, {} context-eligible",
        vocab.len(),
        vocab.context_ids().count()
    );

    let target_ids = targets.resolve(&vocab);
    let layout = layout(&vocab, target_ids.as_ref());
    let partial: Vec<(Run, u64)> = paths
        .par_iter()
        .map(|p| {
            let mut counter = Counter::new(&vocab, &layout.row_index, &layout.col_index, opts);
            let mut stream = stream_sentences(p, tagmap)?;
            for s in stream.by_ref() {
                counter.feed(&s?);
            }
            if stream.skipped_tokens() > 0 {
                log::warn!("{}: skipped {} malformed tokens", p.display(), stream.skipped_tokens());
            }
            Ok(counter.finish())
        })
        .collect::<Result<_>>()?;
    let tokens = partial.iter().map(|p| p.1).sum();
    let run = merge_runs(partial.into_iter().map(|p| p.0).collect());
    Ok(assemble(vocab, layout, run, opts, tokens))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Token;
    use crate::vocab::Pos;

    fn sent(words: &[&str]) -> Sentence {
        words.iter().map(|w| Token::new(*w, Pos::N)).collect()
    }

    fn n(l: &str) -> Word {
        Word::new(l, Pos::N)
    }

    /// Independent enumeration: every ordered pair of distinct positions within the window.
    fn brute_pairs(sents: &[Sentence], window: usize) -> BTreeMap<(String, String), u64> {
        let mut out = BTreeMap::new();
        for s in sents {
            let t: Vec<&Token> = s.tokens.iter().filter(|t| t.pos.is_content()).collect();
            for i in 0..t.len() {
                for j in 0..t.len() {
                    if i != j && i.abs_diff(j) <= window {
                        *out.entry((t[i].lemma.clone(), t[j].lemma.clone())).or_default() += 1;
                    }
                }
            }
        }
        out
    }

    fn count_all(sents: &[Sentence], window: usize) -> CooccurrenceMatrix {
        let vocab = build_vocab(sents.iter().cloned(), 0);
        count_cooccurrences(sents.iter().cloned(), vocab, &CountOptions::new(window), None).unwrap()
    }

    #[test]
    fn window_examples() {
        let s = vec![sent(&["a", "b", "c"])];
        let expected = brute_pairs(&s, 2);
        assert_eq!(expected.len(), 6);
        let m = count_all(&s, 2);
        assert_eq!(m.total(), 6);
        assert_eq!(m.nnz(), 6);
        for ((w, c), k) in &expected {
            assert_eq!(m.count(&n(w), &n(c)), *k);
        }
        let m = count_all(&s, 1);
        assert_eq!(m.total(), 4);
        assert_eq!(m.count(&n("a"), &n("c")), 0);
        assert_eq!(m.count(&n("b"), &n("c")), 1);

        let m = count_all(&[sent(&["solo"])], 3);
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.total(), 0);
    }

    #[test]
    fn same_lemma_at_other_positions_counts() {
        let m = count_all(&[sent(&["a", "a", "b"])], 1);
        assert_eq!(m.count(&n("a"), &n("a")), 2);
        assert_eq!(m.count(&n("a"), &n("b")), 1);
    }

    #[test]
    fn sentence_boundaries_block() {
        let m = count_all(&[sent(&["a"]), sent(&["b"])], 5);
        assert_eq!(m.total(), 0);
    }

    #[test]
    fn zero_window_rejected() {
        let v = build_vocab(vec![sent(&["a"])], 0);
        assert!(matches!(
            count_cooccurrences(Vec::new(), v, &CountOptions::new(0), None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn vocab_thresholds() {
        let mut sents = vec![sent(&["dog"]); 150];
        sents.extend(vec![sent(&["axolotl"]); 3]);
        let v = build_vocab(sents.clone(), 100);
        let dog = v.id(&n("dog")).unwrap();
        let axo = v.id(&n("axolotl")).unwrap();
        assert!(v.is_context(dog));
        assert!(!v.is_context(axo));
        assert_eq!(v.freq(dog), 150);
        let v0 = build_vocab(sents, 0);
        assert_eq!(v0.context_ids().count(), 2);
        assert!(build_vocab(Vec::new(), 100).is_empty());
    }

    #[test]
    fn function_words_and_surface_window() {
        let s = Sentence::new(vec![
            Token::new("a", Pos::N),
            Token::new("the", Pos::O),
            Token::new("b", Pos::V),
        ]);
        let vocab = build_vocab(vec![s.clone()], 0);
        assert_eq!(vocab.len(), 2);
        let filtered = count_cooccurrences(vec![s.clone()], vocab.clone(), &CountOptions::new(1), None).unwrap();
        assert_eq!(filtered.total(), 2);
        let mut opts = CountOptions::new(1);
        opts.window_over = WindowOver::Surface;
        let surface = count_cooccurrences(vec![s], vocab, &opts, None).unwrap();
        assert_eq!(surface.total(), 0);
        assert_eq!(surface.corpus_tokens(), 3);
    }

    #[test]
    fn targets_restrict_rows_and_eligibility_restricts_cols() {
        let mut sents = vec![sent(&["a", "b", "c"]); 3];
        sents.push(sent(&["rare", "a"]));
        let vocab = build_vocab(sents.clone(), 1);
        let a = vocab.id(&n("a")).unwrap();
        let targets: HashSet<WordId> = [a].into_iter().collect();
        let m = count_cooccurrences(sents, vocab, &CountOptions::new(2), Some(&targets)).unwrap();
        assert_eq!(m.rows(), &[a]);
        assert_eq!(m.cols().len(), 3);
        assert_eq!(m.count(&n("a"), &n("b")), 3);
        assert_eq!(m.count(&n("a"), &n("rare")), 0);
        assert_eq!(m.total(), 6);
        m.check_consistency().unwrap();
    }

    #[test]
    fn tiny_flush_threshold_matches_single_run() {
        let sents: Vec<Sentence> = (0..40)
            .map(|i| sent(&["a", "b", "c", "d", "e"][..(i % 5) + 1]))
            .collect();
        let vocab = build_vocab(sents.clone(), 0);
        let big = count_cooccurrences(sents.clone(), vocab.clone(), &CountOptions::new(2), None).unwrap();
        let mut opts = CountOptions::new(2);
        opts.flush_threshold = 1;
        let small = count_cooccurrences(sents, vocab, &opts, None).unwrap();
        assert_eq!(big, small);
    }

    #[test]
    fn target_spec_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("targets.txt");
        std::fs::write(&p, "dog_N\n# comment\nrun\n").unwrap();
        let spec = TargetSpec::from_file(&p).unwrap();
        let vocab = Vocabulary::from_counts(
            vec![(n("dog"), 1), (Word::new("dog", Pos::V), 1), (n("run"), 1), (Word::new("run", Pos::V), 1)],
            0,
        );
        let ids = spec.resolve(&vocab).unwrap();
        assert_eq!(ids.len(), 3);
        assert!(!ids.contains(&vocab.id(&Word::new("dog", Pos::V)).unwrap()));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_corpus() -> impl Strategy<Value = Vec<Sentence>> {
            let tok = (0u8..6, prop_oneof![Just(Pos::N), Just(Pos::V), Just(Pos::O)])
                .prop_map(|(i, p)| Token::new(format!("w{i}"), p));
            proptest::collection::vec(proptest::collection::vec(tok, 0..10).prop_map(Sentence::new), 0..12)
        }

        proptest! {
            #[test]
            fn matches_brute_force_and_is_symmetric(corpus in arb_corpus(), window in 1usize..4) {
                let m = count_all(&corpus, window);
                m.check_consistency().unwrap();
                let brute = brute_pairs(&corpus, window);
                let brute_total: u64 = brute.values().sum();
                prop_assert_eq!(m.total(), brute_total);
                let mut nonzero = 0;
                for (i, &r) in m.rows().iter().enumerate() {
                    let (cols, vals) = m.counts().row(i);
                    for (&c, &v) in cols.iter().zip(vals) {
                        let w = m.vocab().word(r);
                        let cw = m.vocab().word(m.cols()[c as usize]);
                        // same lemma may appear under two POS tags in this corpus
                        prop_assert_eq!(m.count(cw, w), v);
                        nonzero += 1;
                    }
                }
                prop_assert_eq!(nonzero, m.nnz());
                // D is twice the number of unordered co-occurring position pairs
                let mut unordered = 0u64;
                for s in &corpus {
                    let k = s.tokens.iter().filter(|t| t.pos.is_content()).count();
                    for i in 0..k { for j in i + 1..k { if j - i <= window { unordered += 1; } } }
                }
                prop_assert_eq!(m.total(), 2 * unordered);
            }

            #[test]
            fn sentence_order_irrelevant(corpus in arb_corpus(), window in 1usize..4, seed in any::<u64>()) {
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let mut shuffled = corpus.clone();
                shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                prop_assert_eq!(count_all(&corpus, window), count_all(&shuffled, window));
            }
        }
    }
}
