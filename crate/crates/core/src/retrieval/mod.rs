//! Ranking source sentences against a query sentence.
//!
//! BM25 is implemented natively. Dense (GTR-style) and pairwise
//! (MonoT5-style) rankers delegate to external scoring services through the
//! [`EmbeddingScorer`] and [`RelevanceScorer`] traits; deterministic
//! in-process stand-ins are provided for offline runs and tests.

mod bm25;
mod dense;
mod pairwise;
mod prune;

use serde::{Deserialize, Serialize};

pub use bm25::{bm25_rank, Bm25Params};
pub use dense::{cosine, dense_rank, EmbeddingScorer, HashingEmbedder, HttpEmbedder};
pub use pairwise::{pairwise_rank, HttpRelevanceScorer, JaccardRelevance, RelevanceScorer};
pub use prune::prune_sources;

use crate::error::{Error, Result};
use crate::types::SourceDocument;

/// Lowercased alphanumeric runs; everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// (source index, score) pairs, best first; ties by ascending index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    entries: Vec<(usize, f64)>,
}

impl RankedList {
    /// Sorts `entries` into ranking order. Indices must be unique and scores
    /// finite.
    pub fn from_scores(mut entries: Vec<(usize, f64)>) -> Result<Self> {
        if let Some((i, s)) = entries.iter().find(|(_, s)| !s.is_finite()) {
            return Err(Error::Score(format!("non-finite score {s} for sentence {i}")));
        }
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        if has_duplicate(&entries) {
            return Err(Error::Invalid("ranked list repeats a source index".into()));
        }
        Ok(RankedList { entries })
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn top(&self, n: usize) -> &[(usize, f64)] {
        &self.entries[..n.min(self.entries.len())]
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }
}

fn has_duplicate(entries: &[(usize, f64)]) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(entries.len());
    entries.iter().any(|(i, _)| !seen.insert(*i))
}

/// One of the three ranking strategies.
#[derive(Clone, Copy)]
pub enum Ranker<'a> {
    Bm25(Bm25Params),
    Dense(&'a dyn EmbeddingScorer),
    Pairwise(&'a dyn RelevanceScorer),
}

impl Ranker<'_> {
    pub fn rank(&self, query: &str, document: &SourceDocument) -> Result<RankedList> {
        match self {
            Ranker::Bm25(params) => bm25_rank(query, document, params),
            Ranker::Dense(embedder) => dense_rank(query, document, *embedder),
            Ranker::Pairwise(scorer) => pairwise_rank(query, document, *scorer),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Ranker::Bm25(_) => "bm25",
            Ranker::Dense(_) => "dense",
            Ranker::Pairwise(_) => "pairwise",
        }
    }
}
