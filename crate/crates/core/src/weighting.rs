//! PPMI and LMI association weighting.
//!
//! PMI uses the natural logarithm. LMI is the co-occurrence count times the
//! *positive* PMI, so its support is exactly the PPMI support.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::cooccur::{CooccurrenceMatrix, WindowOver};
use crate::error::{Error, Result};
use crate::sparse::Csr;
use crate::vocab::{Vocabulary, WordId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Raw,
    Ppmi,
    Lmi,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Raw => "raw",
            Scheme::Ppmi => "ppmi",
            Scheme::Lmi => "lmi",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "raw" | "freq" | "none" => Ok(Scheme::Raw),
            "ppmi" => Ok(Scheme::Ppmi),
            "lmi" => Ok(Scheme::Lmi),
            _ => Err(Error::config(format!("scheme must be raw|ppmi|lmi, got {s:?}"))),
        }
    }
}

/// `ln(count · D / (|w| · |c|))`.
///
/// Only defined for observed pairs; `count` must be at least 1.
pub fn pmi(count: u64, row_marginal: u64, col_marginal: u64, total: u64) -> f64 {
    debug_assert!(count >= 1 && row_marginal >= count && col_marginal >= count && total >= count);
    (count as f64 * total as f64 / (row_marginal as f64 * col_marginal as f64)).ln()
}

/// Exact sign test for PMI > 0 in integer arithmetic, immune to rounding near independence.
fn pmi_positive(count: u64, row_marginal: u64, col_marginal: u64, total: u64) -> bool {
    count as u128 * total as u128 > row_marginal as u128 * col_marginal as u128
}

/// Sparse association-weighted matrix sharing the layout of the counts it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMatrix {
    pub(crate) vocab: Vocabulary,
    pub(crate) rows: Vec<WordId>,
    pub(crate) cols: Vec<WordId>,
    pub(crate) values: Csr<f64>,
    pub(crate) scheme: Scheme,
    pub(crate) window: u32,
    pub(crate) window_over: WindowOver,
    pub(crate) corpus_tokens: u64,
    pub provenance: BTreeMap<String, String>,
}

impl WeightedMatrix {
    /// Wraps arbitrary weights; used for hand-built models and fixtures.
    pub fn from_parts(vocab: Vocabulary, rows: Vec<WordId>, cols: Vec<WordId>, values: Csr<f64>, scheme: Scheme) -> Self {
        assert_eq!(values.n_rows(), rows.len());
        assert_eq!(values.n_cols(), cols.len());
        WeightedMatrix {
            vocab,
            rows,
            cols,
            values,
            scheme,
            window: 0,
            window_over: WindowOver::Filtered,
            corpus_tokens: 0,
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

    pub fn values(&self) -> &Csr<f64> {
        &self.values
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn corpus_tokens(&self) -> u64 {
        self.corpus_tokens
    }

    pub fn row_of(&self, id: WordId) -> Option<usize> {
        self.rows.binary_search(&id).ok()
    }

    pub fn nnz(&self) -> usize {
        self.values.nnz()
    }
}

fn reweight<F>(m: &CooccurrenceMatrix, scheme: Scheme, f: F) -> WeightedMatrix
where
    F: Fn(u64, u64, u64, u64) -> Option<f64> + Sync,
{
    let d = m.total();
    let rm = m.row_marginals();
    let cm = m.col_marginals();
    let values = m.counts().filter_map(|r, c, count| f(count, rm[r], cm[c as usize], d));
    WeightedMatrix {
        vocab: m.vocab.clone(),
        rows: m.rows.clone(),
        cols: m.cols.clone(),
        values,
        scheme,
        window: m.window,
        window_over: m.window_over,
        corpus_tokens: m.corpus_tokens,
        provenance: m.provenance.clone(),
    }
}

/// Raw counts as weights, for `Scheme::Raw` models.
pub fn apply_raw(m: &CooccurrenceMatrix) -> WeightedMatrix {
    reweight(m, Scheme::Raw, |count, _, _, _| Some(count as f64))
}

/// `max(PMI, 0)`; pairs with non-positive PMI are dropped.
pub fn apply_ppmi(m: &CooccurrenceMatrix) -> WeightedMatrix {
    reweight(m, Scheme::Ppmi, |count, rw, cc, d| {
        if !pmi_positive(count, rw, cc, d) {
            return None;
        }
        let v = pmi(count, rw, cc, d);
        (v > 0.0).then_some(v)
    })
}

/// `count × max(PMI, 0)`; pairs with non-positive PMI are dropped.
pub fn apply_lmi(m: &CooccurrenceMatrix) -> WeightedMatrix {
    reweight(m, Scheme::Lmi, |count, rw, cc, d| {
        if !pmi_positive(count, rw, cc, d) {
            return None;
        }
        let v = count as f64 * pmi(count, rw, cc, d);
        (v > 0.0).then_some(v)
    })
}

pub fn apply(m: &CooccurrenceMatrix, scheme: Scheme) -> WeightedMatrix {
    match scheme {
        Scheme::Raw => apply_raw(m),
        Scheme::Ppmi => apply_ppmi(m),
        Scheme::Lmi => apply_lmi(m),
    }
}
