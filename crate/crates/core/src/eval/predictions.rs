//! Predictions file: one JSON object per answer.
//!
//! ```json
//! {"question_id": "q1", "answer_id": "a1",
//!  "sentences": [{"index": 0, "attributions": [{"index": 3, "score": 0.91}]}]}
//! ```

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attribute::AttributionList;
use crate::datasets::{write_jsonl, CanonicalRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoredIndex {
    pub index: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SentencePrediction {
    pub index: usize,
    pub attributions: Vec<ScoredIndex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    pub question_id: String,
    pub answer_id: String,
    pub sentences: Vec<SentencePrediction>,
}

impl PredictionRecord {
    pub fn new(question_id: impl Into<String>, answer_id: impl Into<String>, lists: &[AttributionList]) -> Self {
        PredictionRecord {
            question_id: question_id.into(),
            answer_id: answer_id.into(),
            sentences: lists
                .iter()
                .map(|l| SentencePrediction {
                    index: l.answer_sentence_index,
                    attributions: l
                        .attributions
                        .iter()
                        .map(|&(index, score)| ScoredIndex { index, score })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_lists(&self) -> Vec<AttributionList> {
        self.sentences
            .iter()
            .map(|s| AttributionList {
                answer_sentence_index: s.index,
                attributions: s.attributions.iter().map(|a| (a.index, a.score)).collect(),
            })
            .collect()
    }

    pub fn key(&self) -> (&str, &str) {
        (&self.question_id, &self.answer_id)
    }
}

pub fn write_predictions(records: &[PredictionRecord], path: impl AsRef<Path>) -> Result<()> {
    write_jsonl(records, path)
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Pairs each gold record with its predictions by (question id, answer id).
/// Every gold record must have exactly one prediction and vice versa.
pub fn join_predictions<'a>(
    gold: &'a [CanonicalRecord],
    predictions: &[PredictionRecord],
) -> Result<Vec<(&'a CanonicalRecord, Vec<AttributionList>)>> {
    let mut by_key: HashMap<(&str, &str), &PredictionRecord> = HashMap::new();
    for p in predictions {
        if by_key.insert(p.key(), p).is_some() {
            return Err(Error::Invalid(format!(
                "duplicate predictions for question {} answer {}",
                p.question_id, p.answer_id
            )));
        }
    }
    let mut out = Vec::with_capacity(gold.len());
    for r in gold {
        let p = by_key.remove(&(r.question_id(), r.answer_id())).ok_or_else(|| {
            Error::Invalid(format!(
                "no predictions for question {} answer {}",
                r.question_id(),
                r.answer_id()
            ))
        })?;
        out.push((r, p.to_lists()));
    }
    if let Some(((q, a), _)) = by_key.into_iter().min_by_key(|(k, _)| *k) {
        return Err(Error::Invalid(format!(
            "predictions for question {q} answer {a} match no gold record"
        )));
    }
    Ok(out)
}
