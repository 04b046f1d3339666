use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coarse part-of-speech tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    /// Noun.
    N,
    /// Verb.
    V,
    /// Adjective.
    J,
    /// Everything else.
    O,
}

impl Pos {
    pub fn is_content(self) -> bool {
        !matches!(self, Pos::O)
    }

    pub fn as_char(self) -> char {
        match self {
            Pos::N => 'N',
            Pos::V => 'V',
            Pos::J => 'J',
            Pos::O => 'O',
        }
    }

    pub(crate) fn to_byte(self) -> u8 {
        self.as_char() as u8
    }

    pub(crate) fn from_byte(b: u8) -> Option<Pos> {
        match b {
            b'N' => Some(Pos::N),
            b'V' => Some(Pos::V),
            b'J' => Some(Pos::J),
            b'O' => Some(Pos::O),
            _ => None,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Pos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Pos> {
        match s {
            "N" | "n" => Ok(Pos::N),
            "V" | "v" => Ok(Pos::V),
            "J" | "j" | "A" | "a" => Ok(Pos::J),
            "O" | "o" => Ok(Pos::O),
            _ => Err(Error::config(format!("unknown coarse POS tag {s:?}"))),
        }
    }
}

/// A lemma together with its coarse POS; the key of every vocabulary entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    pub lemma: String,
    pub pos: Pos,
}

impl Word {
    pub fn new(lemma: impl Into<String>, pos: Pos) -> Self {
        Word {
            lemma: lemma.into(),
            pos,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.lemma, self.pos)
    }
}

/// Parses `lemma_P` where `P` is a coarse tag.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let (lemma, tag) = s
            .rsplit_once('_')
            .ok_or_else(|| Error::config(format!("expected lemma_POS, got {s:?}")))?;
        if lemma.is_empty() {
            return Err(Error::config(format!("empty lemma in {s:?}")));
        }
        Ok(Word::new(lemma.to_lowercase(), tag.parse()?))
    }
}

pub type WordId = u32;

/// Bidirectional `(lemma, pos) <-> id` map with corpus frequencies.
///
/// Ids are dense and assigned in `(lemma, pos)` order, so the same multiset of
/// tokens always yields the same ids regardless of the order they were seen in.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Vocabulary {
    words: Vec<Word>,
    freqs: Vec<u64>,
    id_of: HashMap<Word, WordId>,
    min_context_freq: u64,
}

impl Vocabulary {
    /// Builds a vocabulary from `(word, frequency)` pairs. Duplicate words are summed.
    pub fn from_counts<I>(counts: I, min_context_freq: u64) -> Self
    where
        I: IntoIterator<Item = (Word, u64)>,
    {
        let mut merged: HashMap<Word, u64> = HashMap::new();
        for (w, f) in counts {
            *merged.entry(w).or_default() += f;
        }
        let mut entries: Vec<(Word, u64)> = merged.into_iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Self::from_sorted(entries, min_context_freq)
    }

    fn from_sorted(entries: Vec<(Word, u64)>, min_context_freq: u64) -> Self {
        let mut words = Vec::with_capacity(entries.len());
        let mut freqs = Vec::with_capacity(entries.len());
        let mut id_of = HashMap::with_capacity(entries.len());
        for (i, (w, f)) in entries.into_iter().enumerate() {
            id_of.insert(w.clone(), i as WordId);
            words.push(w);
            freqs.push(f);
        }
        Vocabulary {
            words,
            freqs,
            id_of,
            min_context_freq,
        }
    }

    /// Rebuilds a vocabulary from stored parts, keeping the stored id order.
    pub(crate) fn from_parts(words: Vec<Word>, freqs: Vec<u64>, min_context_freq: u64) -> Result<Self> {
        let mut id_of = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if id_of.insert(w.clone(), i as WordId).is_some() {
                return Err(Error::config(format!("duplicate vocabulary entry {w}")));
            }
        }
        Ok(Vocabulary {
            words,
            freqs,
            id_of,
            min_context_freq,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &Word) -> Option<WordId> {
        self.id_of.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> &Word {
        &self.words[id as usize]
    }

    pub fn freq(&self, id: WordId) -> u64 {
        self.freqs[id as usize]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn freqs(&self) -> &[u64] {
        &self.freqs
    }

    pub fn min_context_freq(&self) -> u64 {
        self.min_context_freq
    }

    /// A word may serve as a context when its frequency is strictly above the threshold.
    pub fn is_context(&self, id: WordId) -> bool {
        self.freqs[id as usize] > self.min_context_freq
    }

    pub fn context_ids(&self) -> impl Iterator<Item = WordId> + '_ {
        (0..self.len() as WordId).filter(move |&id| self.is_context(id))
    }

    /// Total number of token occurrences counted into the vocabulary.
    pub fn total_freq(&self) -> u64 {
        self.freqs.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_dense_and_inverse() {
        let v = Vocabulary::from_counts(
            vec![
                (Word::new("dog", Pos::N), 3),
                (Word::new("cat", Pos::N), 1),
                (Word::new("dog", Pos::V), 2),
                (Word::new("cat", Pos::N), 4),
            ],
            2,
        );
        assert_eq!(v.len(), 3);
        for id in 0..v.len() as WordId {
            assert_eq!(v.id(v.word(id)), Some(id));
        }
        let cat = v.id(&Word::new("cat", Pos::N)).unwrap();
        assert_eq!(v.freq(cat), 5);
        assert!(v.is_context(cat));
        // 2 is not above the threshold of 2
        assert!(!v.is_context(v.id(&Word::new("dog", Pos::V)).unwrap()));
    }

    #[test]
    fn word_parse() {
        assert_eq!("Dog_N".parse::<Word>().unwrap(), Word::new("dog", Pos::N));
        assert_eq!("new_york_J".parse::<Word>().unwrap(), Word::new("new_york", Pos::J));
        assert!("dog".parse::<Word>().is_err());
        assert!("_N".parse::<Word>().is_err());
        assert!("dog_X".parse::<Word>().is_err());
    }
}
