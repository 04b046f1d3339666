//! Hubness analysis: nearest-neighbor rank against corpus frequency rank.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::similarity::{nearest_neighbors, Measure, SimParams, Space};
use crate::vocab::{Vocabulary, Word, WordId};

/// Rank of every vocabulary id, indexed by id. Rank 1 is the most frequent word.
pub fn frequency_ranks(vocab: &Vocabulary) -> Vec<usize> {
    let mut order: Vec<WordId> = (0..vocab.len() as WordId).collect();
    order.sort_by(|&a, &b| vocab.freq(b).cmp(&vocab.freq(a)).then(a.cmp(&b)));
    let mut ranks = vec![0; vocab.len()];
    for (i, id) in order.into_iter().enumerate() {
        ranks[id as usize] = i + 1;
    }
    ranks
}

#[derive(Clone, Debug, PartialEq)]
pub struct HubnessPoint {
    pub query: Word,
    pub nn_rank: usize,
    pub neighbor: Word,
    pub freq_rank: usize,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankSummary {
    pub nn_rank: usize,
    pub mean_freq_rank: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HubnessProfile {
    pub measure: Measure,
    pub k: usize,
    pub points: Vec<HubnessPoint>,
    pub summary: Vec<RankSummary>,
    pub n_queries: usize,
    /// Queries without a usable vector (OOV or zero norm).
    pub skipped: Vec<Word>,
}

/// Top-`k` neighbors of every query with their frequency ranks.
///
/// A query whose space has fewer than `k` scorable candidates contributes fewer points.
pub fn hubness_profile(space: &Space, queries: &[Word], k: usize, measure: Measure, params: &SimParams) -> Result<HubnessProfile> {
    if k < 1 {
        return Err(Error::config("K must be at least 1"));
    }
    if queries.is_empty() {
        return Err(Error::Evaluation("no query words".into()));
    }
    let ranks = frequency_ranks(space.vocab());
    let per_query: Vec<Option<Vec<HubnessPoint>>> = queries
        .par_iter()
        .map(|q| match nearest_neighbors(space, q, k, measure, params) {
            Ok(ns) => Ok(Some(
                ns.into_iter()
                    .enumerate()
                    .map(|(i, n)| HubnessPoint {
                        query: q.clone(),
                        nn_rank: i + 1,
                        freq_rank: ranks[n.id as usize],
                        neighbor: n.word,
                        score: n.score,
                    })
                    .collect(),
            )),
            Err(Error::OutOfVocabulary(_) | Error::UndefinedSimilarity(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (q, r) in queries.iter().zip(per_query) {
        match r {
            Some(ps) => points.extend(ps),
            None => skipped.push(q.clone()),
        }
    }
    if skipped.len() == queries.len() {
        return Err(Error::Evaluation(format!(
            "none of the {} query words has a vector",
            queries.len()
        )));
    }
    let mut sums = vec![(0usize, 0usize); k];
    for p in &points {
        let s = &mut sums[p.nn_rank - 1];
        s.0 += p.freq_rank;
        s.1 += 1;
    }
    let summary = sums
        .into_iter()
        .enumerate()
        .filter(|(_, (_, n))| *n > 0)
        .map(|(i, (total, n))| RankSummary {
            nn_rank: i + 1,
            mean_freq_rank: total as f64 / n as f64,
            n,
        })
        .collect();
    Ok(HubnessProfile {
        measure,
        k,
        points,
        summary,
        n_queries: queries.len(),
        skipped,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::io(path, std::io::Error::other(e))
}

fn with_fingerprint(path: &Path, fingerprint: &str) -> Result<csv::Writer<std::fs::File>> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(file, "# fingerprint={fingerprint}").map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// `query,nn_rank,neighbor,freq_rank,score`
pub fn write_points_csv(profile: &HubnessProfile, fingerprint: &str, path: &Path) -> Result<()> {
    let mut w = with_fingerprint(path, fingerprint)?;
    w.write_record(["query", "nn_rank", "neighbor", "freq_rank", "score"])
        .map_err(csv_err(path))?;
    for p in &profile.points {
        w.write_record([
            p.query.to_string(),
            p.nn_rank.to_string(),
            p.neighbor.to_string(),
            p.freq_rank.to_string(),
            p.score.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `nn_rank,mean_freq_rank,n`
pub fn write_summary_csv(profile: &HubnessProfile, fingerprint: &str, path: &Path) -> Result<()> {
    let mut w = with_fingerprint(path, fingerprint)?;
    w.write_record(["nn_rank", "mean_freq_rank", "n"]).map_err(csv_err(path))?;
    for s in &profile.summary {
        w.write_record([s.nn_rank.to_string(), s.mean_freq_rank.to_string(), s.n.to_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
