//! Vector Cosine and APSyn.
//!
//! APSyn compares the top-`N` contexts of two words, each context list ranked by
//! descending weight:
//!
//! ```text
//! APSyn(w1, w2) = Σ_{f ∈ top_N(w1) ∩ top_N(w2)} 1 / ((rank1(f) + rank2(f)) / 2)
//! ```
//!
//! Ranks are strict positions starting at 1; equal weights are ordered by
//! ascending context index. Shared contexts are always summed in ascending context
//! index, so scores are exactly symmetric and neighbor scores computed through the
//! inverted indexes are bit-identical to pairwise scores.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::container::AnyModel;
use crate::error::{Error, Result};
use crate::svd::DenseModel;
use crate::vocab::{Vocabulary, Word, WordId};
use crate::weighting::{self, Scheme, WeightedMatrix};

pub const DEFAULT_APSYN_N: usize = 500;
pub const DEFAULT_N_MAX: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Cosine,
    Apsyn,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Cosine => "cosine",
            Measure::Apsyn => "apsyn",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cosine" | "cos" => Ok(Measure::Cosine),
            "apsyn" => Ok(Measure::Apsyn),
            _ => Err(Error::config(format!("measure must be cosine|apsyn, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityScore {
    pub value: f64,
    pub measure: Measure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimParams {
    /// Top contexts compared by APSyn.
    pub apsyn_n: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            apsyn_n: DEFAULT_APSYN_N,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cosine undefined for a zero vector")]
pub struct ZeroVector;

/// `dot(a, b) / (‖a‖ ‖b‖)`, clamped to `[-1, 1]`.
pub fn cosine(a: &[f64], b: &[f64]) -> std::result::Result<f64, ZeroVector> {
    assert_eq!(a.len(), b.len(), "cosine of vectors with different dimensionality");
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    cosine_from_parts(dot, norm(a), norm(b))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn cosine_from_parts(dot: f64, na: f64, nb: f64) -> std::result::Result<f64, ZeroVector> {
    if na == 0.0 || nb == 0.0 {
        return Err(ZeroVector);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Dot product of two sparse rows with ascending indices.
pub fn sparse_dot(ai: &[u32], av: &[f64], bi: &[u32], bv: &[f64]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < ai.len() && j < bi.len() {
        match ai[i].cmp(&bi[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += av[i] * bv[j];
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Context indices of one row ordered by descending weight; rank = position + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedContextList {
    pub target: WordId,
    contexts: Vec<u32>,
    n_max: usize,
}

impl RankedContextList {
    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `(context, rank)` pairs, best first.
    pub fn entries(&self) -> impl Iterator<Item = (u32, usize)> + '_ {
        self.contexts.iter().enumerate().map(|(i, &c)| (c, i + 1))
    }

    pub fn top(&self, n: usize) -> &[u32] {
        &self.contexts[..n.min(self.contexts.len())]
    }
}

/// Ranks the positive entries of a sparse row. Ties go to the lower context index.
pub fn build_ranked_list(target: WordId, cols: &[u32], weights: &[f64], n_max: usize) -> RankedContextList {
    assert!(n_max >= 1, "n_max must be at least 1");
    let mut order: Vec<usize> = (0..cols.len()).filter(|&i| weights[i] > 0.0).collect();
    order.sort_unstable_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(cols[a].cmp(&cols[b])));
    order.truncate(n_max);
    RankedContextList {
        target,
        contexts: order.into_iter().map(|i| cols[i]).collect(),
        n_max,
    }
}

fn check_n(n: usize, a: &RankedContextList, b: &RankedContextList) -> Result<()> {
    if n < 1 {
        return Err(Error::config("APSyn N must be at least 1"));
    }
    let limit = a.n_max.min(b.n_max);
    if n > limit {
        return Err(Error::config(format!(
            "APSyn N = {n} exceeds the ranked-list length limit {limit}"
        )));
    }
    Ok(())
}

/// Sorted `(context, rank)` for the top `n` entries.
fn top_by_context(l: &RankedContextList, n: usize) -> Vec<(u32, usize)> {
    let mut v: Vec<(u32, usize)> = l.entries().take(n).collect();
    v.sort_unstable();
    v
}

fn apsyn_sorted(a: &[(u32, usize)], b: &[(u32, usize)]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += apsyn_term(a[i].1, b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

fn apsyn_term(r1: usize, r2: usize) -> f64 {
    2.0 / (r1 + r2) as f64
}

pub fn apsyn(a: &RankedContextList, b: &RankedContextList, n: usize) -> Result<f64> {
    check_n(n, a, b)?;
    Ok(apsyn_sorted(&top_by_context(a, n), &top_by_context(b, n)))
}

/// `H_n = Σ_{i=1..n} 1/i`, the APSyn self-similarity of a list with at least `n` entries.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// Column-oriented view of a sparse matrix for one-against-all dot products.
struct Inverted {
    /// per column: (row, value), rows ascending
    postings: Vec<Vec<(u32, f64)>>,
}

/// Per column: (row, rank) for every row whose top-N contains it.
struct RankIndex {
    postings: Vec<Vec<(u32, u32)>>,
}

/// A sparse weighted space with cached norms, ranked lists and indexes.
pub struct SparseSpace {
    matrix: WeightedMatrix,
    norms: Vec<f64>,
    n_max: usize,
    ranked: OnceLock<Vec<RankedContextList>>,
    inverted: OnceLock<Inverted>,
    rank_index: Mutex<HashMap<usize, Arc<RankIndex>>>,
}

impl SparseSpace {
    pub fn new(matrix: WeightedMatrix, n_max: usize) -> Self {
        let v = matrix.values();
        let norms = (0..v.n_rows()).into_par_iter().map(|r| v.row_norm(r)).collect();
        SparseSpace {
            matrix,
            norms,
            n_max: n_max.max(1),
            ranked: OnceLock::new(),
            inverted: OnceLock::new(),
            rank_index: Mutex::new(HashMap::new()),
        }
    }

    pub fn matrix(&self) -> &WeightedMatrix {
        &self.matrix
    }

    pub fn ranked_lists(&self) -> &[RankedContextList] {
        self.ranked.get_or_init(|| {
            let v = self.matrix.values();
            let rows = self.matrix.rows();
            (0..v.n_rows())
                .into_par_iter()
                .map(|r| {
                    let (c, w) = v.row(r);
                    build_ranked_list(rows[r], c, w, self.n_max)
                })
                .collect()
        })
    }

    fn inverted(&self) -> &Inverted {
        self.inverted.get_or_init(|| {
            let v = self.matrix.values();
            let mut postings = vec![Vec::new(); v.n_cols()];
            for (r, c, x) in v.iter() {
                postings[c as usize].push((r as u32, x));
            }
            Inverted { postings }
        })
    }

    fn rank_index(&self, n: usize) -> Arc<RankIndex> {
        let mut cache = self.rank_index.lock().unwrap();
        cache
            .entry(n)
            .or_insert_with(|| {
                let mut postings = vec![Vec::new(); self.matrix.values().n_cols()];
                for (r, l) in self.ranked_lists().iter().enumerate() {
                    for (c, rank) in l.entries().take(n) {
                        postings[c as usize].push((r as u32, rank as u32));
                    }
                }
                Arc::new(RankIndex { postings })
            })
            .clone()
    }

    fn cosine_rows(&self, a: usize, b: usize) -> std::result::Result<f64, ZeroVector> {
        let v = self.matrix.values();
        let (ai, av) = v.row(a);
        let (bi, bv) = v.row(b);
        cosine_from_parts(sparse_dot(ai, av, bi, bv), self.norms[a], self.norms[b])
    }

    fn check_apsyn(&self, n: usize) -> Result<()> {
        if self.matrix.scheme() == Scheme::Raw {
            return Err(Error::config("APSyn needs a PPMI or LMI weighted model"));
        }
        if n < 1 || n > self.n_max {
            return Err(Error::config(format!(
                "APSyn N = {n} outside 1..={} (ranked lists are truncated at {})",
                self.n_max, self.n_max
            )));
        }
        Ok(())
    }
}

pub struct DenseSpace {
    model: DenseModel,
    norms: Vec<f64>,
}

impl DenseSpace {
    pub fn new(model: DenseModel) -> Self {
        let norms = (0..model.rows().len()).map(|r| norm(model.vector(r))).collect();
        DenseSpace { model, norms }
    }

    pub fn model(&self) -> &DenseModel {
        &self.model
    }
}

/// A loaded model ready for similarity queries.
pub enum Space {
    Sparse(SparseSpace),
    Dense(DenseSpace),
}

impl From<AnyModel> for Space {
    fn from(m: AnyModel) -> Self {
        match m {
            AnyModel::Counts(c) => Space::Sparse(SparseSpace::new(weighting::apply_raw(&c), DEFAULT_N_MAX)),
            AnyModel::Weighted(w) => Space::Sparse(SparseSpace::new(w, DEFAULT_N_MAX)),
            AnyModel::Dense(d) => Space::Dense(DenseSpace::new(d)),
        }
    }
}

impl Space {
    pub fn sparse(matrix: WeightedMatrix) -> Self {
        Space::Sparse(SparseSpace::new(matrix, DEFAULT_N_MAX))
    }

    pub fn dense(model: DenseModel) -> Self {
        Space::Dense(DenseSpace::new(model))
    }

    pub fn vocab(&self) -> &Vocabulary {
        match self {
            Space::Sparse(s) => s.matrix.vocab(),
            Space::Dense(d) => d.model.vocab(),
        }
    }

    pub fn rows(&self) -> &[WordId] {
        match self {
            Space::Sparse(s) => s.matrix.rows(),
            Space::Dense(d) => d.model.rows(),
        }
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            Space::Sparse(s) => s.matrix.scheme(),
            Space::Dense(d) => d.model.scheme(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Space::Dense(_))
    }

    /// Row index of a word that has a vector in this space.
    pub fn row(&self, w: &Word) -> Result<usize> {
        self.vocab()
            .id(w)
            .and_then(|id| self.rows().binary_search(&id).ok())
            .ok_or_else(|| Error::OutOfVocabulary(w.clone()))
    }

    pub fn has_vector(&self, w: &Word) -> bool {
        self.row(w).is_ok()
    }

    fn word_of_row(&self, r: usize) -> &Word {
        self.vocab().word(self.rows()[r])
    }

    fn check_measure(&self, measure: Measure, params: &SimParams) -> Result<()> {
        match (self, measure) {
            (Space::Dense(_), Measure::Apsyn) => Err(Error::config(
                "APSyn is defined on sparse weighted models, not on SVD-reduced ones",
            )),
            (Space::Sparse(s), Measure::Apsyn) => s.check_apsyn(params.apsyn_n),
            _ => Ok(()),
        }
    }

    fn score_rows(&self, a: usize, b: usize, measure: Measure, params: &SimParams) -> Result<f64> {
        let zero = |r: usize| Error::UndefinedSimilarity(self.word_of_row(r).clone());
        match (self, measure) {
            (Space::Sparse(s), Measure::Cosine) => s.cosine_rows(a, b).map_err(|_| {
                if s.norms[a] == 0.0 {
                    zero(a)
                } else {
                    zero(b)
                }
            }),
            (Space::Sparse(s), Measure::Apsyn) => {
                let lists = s.ranked_lists();
                apsyn(&lists[a], &lists[b], params.apsyn_n)
            }
            (Space::Dense(d), Measure::Cosine) => {
                let (va, vb) = (d.model.vector(a), d.model.vector(b));
                let dot = va.iter().zip(vb).map(|(x, y)| x * y).sum();
                cosine_from_parts(dot, d.norms[a], d.norms[b]).map_err(|_| {
                    if d.norms[a] == 0.0 {
                        zero(a)
                    } else {
                        zero(b)
                    }
                })
            }
            (Space::Dense(_), Measure::Apsyn) => unreachable!("rejected by check_measure"),
        }
    }

    /// `None` where the score is undefined (zero vectors under cosine).
    fn score_against_all(&self, q: usize, measure: Measure, params: &SimParams) -> Vec<Option<f64>> {
        let n = self.rows().len();
        match (self, measure) {
            (Space::Sparse(s), Measure::Cosine) => {
                if s.norms[q] == 0.0 {
                    return vec![None; n];
                }
                let inv = s.inverted();
                let mut dots = vec![0.0; n];
                let (qi, qv) = s.matrix.values().row(q);
                for (&c, &x) in qi.iter().zip(qv) {
                    for &(r, y) in &inv.postings[c as usize] {
                        dots[r as usize] += x * y;
                    }
                }
                dots.iter()
                    .zip(&s.norms)
                    .map(|(&d, &nr)| cosine_from_parts(d, s.norms[q], nr).ok())
                    .collect()
            }
            (Space::Sparse(s), Measure::Apsyn) => {
                let index = s.rank_index(params.apsyn_n);
                let mut scores = vec![0.0; n];
                for (c, rq) in top_by_context(&s.ranked_lists()[q], params.apsyn_n) {
                    for &(r, rr) in &index.postings[c as usize] {
                        scores[r as usize] += apsyn_term(rq, rr as usize);
                    }
                }
                scores.into_iter().map(Some).collect()
            }
            (Space::Dense(d), Measure::Cosine) => {
                let qv = d.model.vector(q);
                (0..n)
                    .into_par_iter()
                    .map(|r| {
                        let dot = qv.iter().zip(d.model.vector(r)).map(|(x, y)| x * y).sum();
                        cosine_from_parts(dot, d.norms[q], d.norms[r]).ok()
                    })
                    .collect()
            }
            (Space::Dense(_), Measure::Apsyn) => unreachable!("rejected by check_measure"),
        }
    }
}

pub fn pair_similarity(space: &Space, w1: &Word, w2: &Word, measure: Measure, params: &SimParams) -> Result<SimilarityScore> {
    space.check_measure(measure, params)?;
    let a = space.row(w1)?;
    let b = space.row(w2)?;
    Ok(SimilarityScore {
        value: space.score_rows(a, b, measure, params)?,
        measure,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Neighbor {
    pub id: WordId,
    pub word: Word,
    pub score: f64,
}

/// Exact top-`k` neighbors of `w`, best first; ties go to the lower word id.
pub fn nearest_neighbors(
    space: &Space,
    w: &Word,
    top_k: usize,
    measure: Measure,
    params: &SimParams,
) -> Result<Vec<Neighbor>> {
    if top_k < 1 {
        return Err(Error::config("top_k must be at least 1"));
    }
    space.check_measure(measure, params)?;
    let q = space.row(w)?;
    if measure == Measure::Cosine {
        // surface the zero-vector case instead of returning an empty list
        let zero = match space {
            Space::Sparse(s) => s.norms[q] == 0.0,
            Space::Dense(d) => d.norms[q] == 0.0,
        };
        if zero {
            return Err(Error::UndefinedSimilarity(w.clone()));
        }
    }
    let scores = space.score_against_all(q, measure, params);
    let mut cands: Vec<(usize, f64)> = scores
        .into_iter()
        .enumerate()
        .filter_map(|(r, s)| s.filter(|_| r != q).map(|s| (r, s)))
        .collect();
    let by_rank = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
    if cands.len() > top_k {
        cands.select_nth_unstable_by(top_k - 1, by_rank);
        cands.truncate(top_k);
    }
    cands.sort_unstable_by(by_rank);
    let rows = space.rows();
    Ok(cands
        .into_iter()
        .map(|(r, score)| Neighbor {
            id: rows[r],
            word: space.vocab().word(rows[r]).clone(),
            score,
        })
        .collect())
}
