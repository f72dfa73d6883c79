use std::collections::BTreeSet;

use super::Ranker;
use crate::error::{Error, Result};
use crate::par;
use crate::types::{AnswerRecord, SourceDocument};

/// Keeps the union of the top-`limit` sentences for each answer sentence
/// (used as the query), in document order with original indices. Documents
/// no longer than `limit` are returned unchanged.
pub fn prune_sources(
    document: &SourceDocument,
    answer: &AnswerRecord,
    ranker: &Ranker<'_>,
    limit: usize,
) -> Result<SourceDocument> {
    if limit == 0 {
        return Err(Error::Invalid("prune limit must be at least 1".into()));
    }
    if document.len() <= limit {
        return Ok(document.clone());
    }
    let tops = par::try_map(answer.sentences(), |s| {
        ranker
            .rank(&s.text, document)
            .map(|r| r.top(limit).iter().map(|e| e.0).collect::<Vec<_>>())
    })?;
    let keep: BTreeSet<usize> = tops.into_iter().flatten().collect();
    document.subset(&keep)
}
