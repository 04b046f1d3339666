//! Streaming reader for POS-tagged corpora.
//!
//! Corpus files hold one sentence per line; tokens are whitespace separated and
//! written `lemma_TAG`, where `TAG` belongs to the source tagset (Penn Treebank,
//! TreeTagger, ...). A [`TagMap`] collapses source tags onto the coarse
//! [`Pos`] set. Files starting with the gzip magic bytes are decompressed on the fly.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};
use crate::vocab::{Pos, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub lemma: String,
    pub pos: Pos,
}

impl Token {
    pub fn new(lemma: impl Into<String>, pos: Pos) -> Self {
        Token {
            lemma: lemma.into(),
            pos,
        }
    }

    pub fn word(&self) -> Word {
        Word::new(self.lemma.clone(), self.pos)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl FromIterator<Token> for Sentence {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        Sentence::new(iter.into_iter().collect())
    }
}

/// Keeps nouns, verbs and adjectives, in order.
pub fn content_filter(s: Sentence) -> Sentence {
    s.tokens.into_iter().filter(|t| t.pos.is_content()).collect()
}

/// Maps source-tagset tags onto coarse tags.
///
/// Rules are either exact (`NNS=N`) or prefix rules (`NN*=N`). Exact rules win,
/// then the longest matching prefix; anything unmatched is [`Pos::O`].
#[derive(Clone, Debug)]
pub struct TagMap {
    exact: Vec<(String, Pos)>,
    prefixes: Vec<(String, Pos)>,
}

impl Default for TagMap {
    /// Penn Treebank prefixes, which also cover TreeTagger's `VV*` verbs.
    fn default() -> Self {
        let mut m = TagMap::empty();
        m.insert("NN*", Pos::N);
        m.insert("VB*", Pos::V);
        m.insert("VV*", Pos::V);
        m.insert("JJ*", Pos::J);
        m
    }
}

impl TagMap {
    pub fn empty() -> Self {
        TagMap {
            exact: Vec::new(),
            prefixes: Vec::new(),
        }
    }

    pub fn insert(&mut self, pattern: &str, pos: Pos) {
        let pattern = pattern.to_ascii_uppercase();
        match pattern.strip_suffix('*') {
            Some(prefix) => {
                self.prefixes.retain(|(p, _)| p != prefix);
                self.prefixes.push((prefix.to_string(), pos));
                self.prefixes.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
            }
            None => {
                self.exact.retain(|(p, _)| *p != pattern);
                self.exact.push((pattern, pos));
            }
        }
    }

    /// Reads `TAG=POS` (or `TAG POS`) lines; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut m = TagMap::empty();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (tag, pos) = line
                .split_once('=')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or_else(|| Error::Parse {
                    path: origin.to_path_buf(),
                    line: i + 1,
                    message: format!("expected TAG=POS, got {line:?}"),
                })?;
            let pos: Pos = pos.trim().parse().map_err(|_| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message: format!("unknown coarse tag {:?}", pos.trim()),
            })?;
            m.insert(tag.trim(), pos);
        }
        Ok(m)
    }

    pub fn map(&self, tag: &str) -> Pos {
        let tag = tag.to_ascii_uppercase();
        if let Some((_, pos)) = self.exact.iter().find(|(t, _)| *t == tag) {
            return *pos;
        }
        self.prefixes
            .iter()
            .find(|(p, _)| tag.starts_with(p.as_str()))
            .map(|(_, pos)| *pos)
            .unwrap_or(Pos::O)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed token {0:?}: expected lemma_TAG")]
pub struct MalformedToken(pub String);

/// Parses one `lemma_TAG` token. The lemma is lowercased; the separator is the
/// last underscore so lemmas may themselves contain underscores.
pub fn parse_token(raw: &str, tagmap: &TagMap) -> std::result::Result<Token, MalformedToken> {
    match raw.rsplit_once('_') {
        Some((lemma, tag)) if !lemma.is_empty() && !tag.is_empty() && !raw.contains(char::is_whitespace) => {
            Ok(Token::new(lemma.to_lowercase(), tagmap.map(tag)))
        }
        _ => Err(MalformedToken(raw.to_string())),
    }
}

fn open_maybe_gzip(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 16, file);
    let head = reader.fill_buf().map_err(|e| Error::io(path, e))?;
    if head.starts_with(&[0x1f, 0x8b]) {
        let decoder: Box<dyn Read + Send> = Box::new(MultiGzDecoder::new(reader));
        Ok(Box::new(BufReader::with_capacity(1 << 16, decoder)))
    } else {
        Ok(Box::new(reader))
    }
}

/// Lazily yields one [`Sentence`] per line of a corpus file.
///
/// Malformed tokens are dropped and counted in [`SentenceStream::skipped_tokens`].
/// A read error ends the stream with an `Err` item.
pub struct SentenceStream<'a> {
    reader: Box<dyn BufRead + Send>,
    tagmap: &'a TagMap,
    path: PathBuf,
    buf: String,
    skipped: u64,
    failed: bool,
}

impl SentenceStream<'_> {
    pub fn skipped_tokens(&self) -> u64 {
        self.skipped
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Iterator for SentenceStream<'_> {
    type Item = Result<Sentence>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        self.buf.clear();
        match self.reader.read_line(&mut self.buf) {
            Ok(0) => None,
            Ok(_) => {
                let mut tokens = Vec::new();
                for raw in self.buf.split_whitespace() {
                    match parse_token(raw, self.tagmap) {
                        Ok(t) => tokens.push(t),
                        Err(_) => self.skipped += 1,
                    }
                }
                Some(Ok(Sentence::new(tokens)))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(Error::io(&self.path, e)))
            }
        }
    }
}

pub fn stream_sentences<'a>(path: &Path, tagmap: &'a TagMap) -> Result<SentenceStream<'a>> {
    Ok(SentenceStream {
        reader: open_maybe_gzip(path)?,
        tagmap,
        path: path.to_path_buf(),
        buf: String::new(),
        skipped: 0,
        failed: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn toks(s: &[(&str, Pos)]) -> Sentence {
        s.iter().map(|(l, p)| Token::new(*l, *p)).collect()
    }

    #[test]
    fn parse_token_examples() {
        let m = TagMap::default();
        assert_eq!(parse_token("Dog_NN", &m).unwrap(), Token::new("dog", Pos::N));
        assert_eq!(parse_token("run_VVZ", &m).unwrap(), Token::new("run", Pos::V));
        assert_eq!(parse_token("the_DT", &m).unwrap(), Token::new("the", Pos::O));
        assert_eq!(parse_token("big_JJR", &m).unwrap(), Token::new("big", Pos::J));
        assert!(parse_token("dog", &m).is_err());
        assert!(parse_token("_NN", &m).is_err());
        assert!(parse_token("dog_", &m).is_err());
    }

    #[test]
    fn tagmap_exact_beats_prefix() {
        let m = TagMap::parse("NN*=N\nNNP = O # proper nouns\nV* V\n", Path::new("x")).unwrap();
        assert_eq!(m.map("NNS"), Pos::N);
        assert_eq!(m.map("NNP"), Pos::O);
        assert_eq!(m.map("VBD"), Pos::V);
        assert_eq!(m.map("JJ"), Pos::O);
        assert!(TagMap::parse("NN=Q", Path::new("x")).is_err());
        assert!(TagMap::parse("NN", Path::new("x")).is_err());
    }

    #[test]
    fn content_filter_examples() {
        let s = toks(&[("the", Pos::O), ("dog", Pos::N), ("runs", Pos::V)]);
        let f = content_filter(s);
        assert_eq!(f, toks(&[("dog", Pos::N), ("runs", Pos::V)]));
        assert_eq!(content_filter(f.clone()), f);
        assert!(content_filter(toks(&[("a", Pos::O), ("of", Pos::O)])).is_empty());
    }

    #[test]
    fn stream_plain_and_gzip() {
        let dir = tempfile::tempdir().unwrap();
        let plain = dir.path().join("c.txt");
        std::fs::write(&plain, "dog_NN barks_VVZ\n\nbroken the_DT cat_NNS").unwrap();
        let m = TagMap::default();
        let mut stream = stream_sentences(&plain, &m).unwrap();
        let sents: Vec<Sentence> = stream.by_ref().map(|s| s.unwrap()).collect();
        assert_eq!(sents.len(), 3);
        assert_eq!(sents[0], toks(&[("dog", Pos::N), ("barks", Pos::V)]));
        assert!(sents[1].is_empty());
        assert_eq!(sents[2].len(), 2);
        assert_eq!(stream.skipped_tokens(), 1);

        let gz = dir.path().join("c.txt.gz");
        let mut enc = flate2::write::GzEncoder::new(File::create(&gz).unwrap(), flate2::Compression::fast());
        enc.write_all(b"dog_NN barks_VVZ\ncat_NN\n").unwrap();
        enc.finish().unwrap();
        let sents: Vec<Sentence> = stream_sentences(&gz, &m).unwrap().map(|s| s.unwrap()).collect();
        assert_eq!(sents.len(), 2);
        assert_eq!(sents[1], toks(&[("cat", Pos::N)]));

        let empty = dir.path().join("empty.txt");
        std::fs::write(&empty, "").unwrap();
        assert_eq!(stream_sentences(&empty, &m).unwrap().count(), 0);

        assert!(matches!(
            stream_sentences(&dir.path().join("missing"), &m),
            Err(Error::Io { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_pos() -> impl Strategy<Value = Pos> {
            prop_oneof![Just(Pos::N), Just(Pos::V), Just(Pos::J), Just(Pos::O)]
        }

        proptest! {
            #[test]
            fn filter_idempotent(s in proptest::collection::vec(("[a-z]{1,5}", arb_pos()), 0..20)) {
                let s: Sentence = s.into_iter().map(|(l, p)| Token::new(l, p)).collect();
                let once = content_filter(s);
                prop_assert_eq!(content_filter(once.clone()), once);
            }

            #[test]
            fn parsed_lemmas_are_clean(lemma in "[A-Za-z_\u{00C0}-\u{00FF}]{1,8}", tag in "[A-Z]{1,4}") {
                let raw = format!("{lemma}_{tag}");
                let t = parse_token(&raw, &TagMap::default()).unwrap();
                prop_assert!(!t.lemma.is_empty());
                prop_assert!(!t.lemma.contains(char::is_whitespace));
                prop_assert!(!t.lemma.chars().any(char::is_uppercase));
            }

            #[test]
            fn one_sentence_per_line(lines in proptest::collection::vec("[a-z_ NVJ]{0,30}", 0..30)) {
                let dir = tempfile::tempdir().unwrap();
                let p = dir.path().join("c.txt");
                let mut text = lines.join("\n");
                if !lines.is_empty() { text.push('\n'); }
                std::fs::write(&p, text).unwrap();
                let m = TagMap::default();
                prop_assert_eq!(stream_sentences(&p, &m).unwrap().count(), lines.len());
            }
        }
    }
}
