//! Domain types shared by every stage of the pipeline.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One retrieval/attribution unit of a source document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SourceSentenceWire", deny_unknown_fields)]
pub struct SourceSentence {
    pub index: usize,
    pub text: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceSentenceWire {
    index: usize,
    text: String,
}

impl TryFrom<SourceSentenceWire> for SourceSentence {
    type Error = Error;

    fn try_from(w: SourceSentenceWire) -> Result<Self> {
        check_text(&w.text, "source sentence", w.index)?;
        Ok(SourceSentence {
            index: w.index,
            text: w.text,
        })
    }
}

impl SourceSentence {
    /// Trims `text`; empty text is rejected.
    pub fn new(index: usize, text: impl AsRef<str>) -> Result<Self> {
        let text = text.as_ref().trim().to_string();
        check_text(&text, "source sentence", index)?;
        Ok(SourceSentence { index, text })
    }
}

fn check_text(text: &str, what: &str, index: usize) -> Result<()> {
    if text.is_empty() {
        return Err(Error::Invalid(format!("{what} {index} has empty text")));
    }
    if text.trim() != text {
        return Err(Error::Invalid(format!(
            "{what} {index} has leading or trailing whitespace"
        )));
    }
    Ok(())
}

/// Ordered source sentences anchored to a question.
///
/// Documents built from data have indices `0..n`. A pruned document (see
/// [`SourceDocument::subset`]) keeps the original indices, so the only
/// guaranteed ordering property is strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDocument {
    question_id: String,
    sentences: Vec<SourceSentence>,
}

impl SourceDocument {
    pub fn new(question_id: impl Into<String>, sentences: Vec<SourceSentence>) -> Result<Self> {
        let question_id = question_id.into();
        if sentences.is_empty() {
            return Err(Error::Invalid(format!(
                "document for question {question_id} has no sentences"
            )));
        }
        for (pos, s) in sentences.iter().enumerate() {
            if s.index != pos {
                return Err(Error::Invalid(format!(
                    "document for question {question_id}: sentence at position {pos} has index {}",
                    s.index
                )));
            }
        }
        Ok(SourceDocument {
            question_id,
            sentences,
        })
    }

    pub fn from_texts<S: AsRef<str>>(question_id: impl Into<String>, texts: &[S]) -> Result<Self> {
        let sentences = texts
            .iter()
            .enumerate()
            .map(|(i, t)| SourceSentence::new(i, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(question_id, sentences)
    }

    pub fn question_id(&self) -> &str {
        &self.question_id
    }

    pub fn sentences(&self) -> &[SourceSentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Looks up a sentence by its (original) index.
    pub fn get(&self, index: usize) -> Option<&SourceSentence> {
        self.sentences
            .binary_search_by_key(&index, |s| s.index)
            .ok()
            .map(|pos| &self.sentences[pos])
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.get(index).is_some()
    }

    /// Keeps the sentences whose index is in `keep`, in document order, with
    /// their original indices. Unknown indices are ignored.
    pub fn subset(&self, keep: &BTreeSet<usize>) -> Result<Self> {
        let sentences: Vec<SourceSentence> = self
            .sentences
            .iter()
            .filter(|s| keep.contains(&s.index))
            .cloned()
            .collect();
        if sentences.is_empty() {
            return Err(Error::Invalid(format!(
                "subset of document for question {} is empty",
                self.question_id
            )));
        }
        Ok(SourceDocument {
            question_id: self.question_id.clone(),
            sentences,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AnswerSentenceWire", deny_unknown_fields)]
pub struct AnswerSentence {
    pub index: usize,
    pub text: String,
    /// May be empty: a sentence can be attributed to nothing.
    pub gold_attributions: BTreeSet<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerSentenceWire {
    index: usize,
    text: String,
    gold_attributions: Vec<usize>,
}

impl TryFrom<AnswerSentenceWire> for AnswerSentence {
    type Error = Error;

    fn try_from(w: AnswerSentenceWire) -> Result<Self> {
        check_text(&w.text, "answer sentence", w.index)?;
        let gold: BTreeSet<usize> = w.gold_attributions.iter().copied().collect();
        if gold.len() != w.gold_attributions.len() {
            return Err(Error::Invalid(format!(
                "answer sentence {} lists a gold attribution twice",
                w.index
            )));
        }
        Ok(AnswerSentence {
            index: w.index,
            text: w.text,
            gold_attributions: gold,
        })
    }
}

impl AnswerSentence {
    pub fn new(
        index: usize,
        text: impl AsRef<str>,
        gold: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let text = text.as_ref().trim().to_string();
        check_text(&text, "answer sentence", index)?;
        Ok(AnswerSentence {
            index,
            text,
            gold_attributions: gold.into_iter().collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerRecord {
    pub question_id: String,
    pub question: String,
    pub answer_id: String,
    sentences: Vec<AnswerSentence>,
}

impl AnswerRecord {
    pub fn new(
        question_id: impl Into<String>,
        question: impl Into<String>,
        answer_id: impl Into<String>,
        sentences: Vec<AnswerSentence>,
    ) -> Result<Self> {
        let answer_id = answer_id.into();
        if sentences.is_empty() {
            return Err(Error::Invalid(format!("answer {answer_id} has no sentences")));
        }
        for (pos, s) in sentences.iter().enumerate() {
            if s.index != pos {
                return Err(Error::Invalid(format!(
                    "answer {answer_id}: sentence at position {pos} has index {}",
                    s.index
                )));
            }
        }
        Ok(AnswerRecord {
            question_id: question_id.into(),
            question: question.into(),
            answer_id,
            sentences,
        })
    }

    pub fn sentences(&self) -> &[AnswerSentence] {
        &self.sentences
    }
}
