//! Count-based distributional semantic models.
//!
//! The pipeline streams a POS-tagged corpus ([`corpus`]), builds a vocabulary and a
//! sparse target × context co-occurrence matrix ([`cooccur`]), re-weights it with
//! PPMI or LMI ([`weighting`]), optionally reduces it with a truncated SVD ([`svd`]),
//! and scores word pairs with Vector Cosine or APSyn ([`similarity`]).
//! [`eval`] correlates those scores with human benchmark judgments and [`analysis`]
//! relates nearest-neighbor ranks to corpus frequency ranks.
//!
//! All model artifacts share one binary container, described in [`container`].

pub mod analysis;
pub mod config;
pub mod container;
pub mod cooccur;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod similarity;
pub mod sparse;
pub mod svd;
pub mod vocab;
pub mod weighting;

pub use error::{Error, Result};
pub use vocab::{Pos, Vocabulary, Word, WordId};
