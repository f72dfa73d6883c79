use serde::{Deserialize, Serialize};

use super::{
    merge_unit_attributions, optimal_select, ranked_select, AttributionList, CountingScorer,
    EntailmentScorer, SelectionConfig,
};
use crate::decompose::{decompose, Decomposer};
use crate::error::{Error, Result};
use crate::par;
use crate::retrieval::{prune_sources, Ranker};
use crate::types::{AnswerRecord, SourceDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Greedy multi-sentence selection.
    Optimal,
    /// Singleton scores above the threshold, best first.
    Ranked,
}

#[derive(Clone, Copy)]
pub struct PruneSpec<'a> {
    pub ranker: Ranker<'a>,
    pub limit: usize,
}

/// A configured attribution system. The four standard variants are
/// (llm, optimal), (identity, optimal), (llm, ranked) and
/// (identity, ranked).
pub struct Pipeline<'a> {
    pub decomposer: &'a dyn Decomposer,
    pub scorer: &'a dyn EntailmentScorer,
    pub mode: SelectionMode,
    pub selection: SelectionConfig,
    pub prune: Option<PruneSpec<'a>>,
    /// Cap on scored pairs per record.
    pub call_budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordAttribution {
    /// One list per answer sentence, in answer order.
    pub sentences: Vec<AttributionList>,
    pub scorer_calls: u64,
    /// Source sentences left after pruning.
    pub sources_considered: usize,
}

impl Pipeline<'_> {
    pub fn attribute(&self, record: &AnswerRecord, document: &SourceDocument) -> Result<RecordAttribution> {
        self.attribute_inner(record, document).map_err(|e| {
            e.context(format!(
                "question {} answer {}",
                record.question_id, record.answer_id
            ))
        })
    }

    fn attribute_inner(&self, record: &AnswerRecord, document: &SourceDocument) -> Result<RecordAttribution> {
        self.selection.validate()?;
        let sources = match &self.prune {
            Some(p) => prune_sources(document, record, &p.ranker, p.limit)?,
            None => document.clone(),
        };
        let scorer = CountingScorer::new(self.scorer, self.call_budget);
        let sentences = par::try_map(record.sentences(), |sentence| {
            let units = decompose(sentence, self.decomposer)?;
            let selected = units
                .iter()
                .map(|u| match self.mode {
                    SelectionMode::Optimal => optimal_select(u, &sources, &scorer, &self.selection),
                    SelectionMode::Ranked => ranked_select(u, &sources, &scorer, &self.selection),
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.context(format!("answer sentence {}", sentence.index)))?;
            merge_unit_attributions(&selected, sentence.index)
        })?;
        Ok(RecordAttribution {
            sentences,
            scorer_calls: scorer.calls(),
            sources_considered: sources.len(),
        })
    }
}

/// Runs `pipeline` on one record and returns the per-sentence attributions.
pub fn attribute_answer(
    record: &AnswerRecord,
    document: &SourceDocument,
    pipeline: &Pipeline<'_>,
) -> Result<Vec<AttributionList>> {
    pipeline.attribute(record, document).map(|r| r.sentences)
}

/// Retrieval baseline: each answer sentence is a query and the top `keep`
/// ranked sentences are its attributions.
pub fn retrieval_attribute(
    record: &AnswerRecord,
    document: &SourceDocument,
    ranker: &Ranker<'_>,
    keep: usize,
) -> Result<Vec<AttributionList>> {
    par::try_map(record.sentences(), |s| {
        let ranked = ranker
            .rank(&s.text, document)
            .map_err(|e| e.context(format!("answer sentence {}", s.index)))?;
        Ok(AttributionList {
            answer_sentence_index: s.index,
            attributions: ranked.top(keep).to_vec(),
        })
    })
    .map_err(|e: Error| {
        e.context(format!(
            "question {} answer {}",
            record.question_id, record.answer_id
        ))
    })
}
