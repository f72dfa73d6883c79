//! HAGRID corpus → canonical records.
//!
//! Expected raw layout: `train.jsonl` and/or `dev.jsonl` in one directory
//! (a `test.jsonl` is ignored; the corpus has no test split), one question
//! per line:
//!
//! ```json
//! {"query_id": "7", "query": "...",
//!  "quotes": [{"idx": 1, "docid": "d#0", "text": "Passage one."}],
//!  "answers": [{"answer": "A is B [1]. C is D [2].",
//!               "sentences": [{"text": "A is B [1].", "attributable": 1}]}]}
//! ```
//!
//! Each answer becomes one record. Every quote is one source unit. Inline
//! `[n]` markers refer to quote `idx` and become gold attributions; they are
//! removed from the answer text. `sentences` is optional (the answer is
//! segmented otherwise); a sentence annotated as not attributable gets no
//! gold attributions.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use super::{split_files, strip_citation_markers, CanonicalRecord, DocumentBuilder, DropEntry, ReformatOutput, Split};
use crate::error::{Error, Result};
use crate::text::segment_sentences;
use crate::types::{AnswerRecord, AnswerSentence};

const SOURCE: &str = "hagrid";

#[derive(Debug, Deserialize)]
pub struct RawQuestion {
    pub query_id: Value,
    pub query: String,
    pub quotes: Vec<RawQuote>,
    pub answers: Vec<RawAnswer>,
}

#[derive(Debug, Deserialize)]
pub struct RawQuote {
    pub idx: usize,
    pub text: String,
}

#[derive(Debug, Deserialize)]
pub struct RawAnswer {
    pub answer: String,
    #[serde(default)]
    pub sentences: Option<Vec<RawSentence>>,
}

#[derive(Debug, Deserialize)]
pub struct RawSentence {
    pub text: String,
    #[serde(default)]
    pub attributable: Option<Value>,
}

/// `1`, `true` and `"1"` count as attributable; absent means unannotated.
fn attributable(v: &Option<Value>) -> bool {
    match v {
        None | Some(Value::Null) => true,
        Some(Value::Bool(b)) => *b,
        Some(Value::Number(n)) => n.as_f64().is_some_and(|x| x > 0.0),
        Some(Value::String(s)) => matches!(s.trim(), "1" | "true" | "yes"),
        Some(_) => false,
    }
}

fn id_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn reformat_hagrid(raw_dir: impl AsRef<Path>) -> Result<ReformatOutput> {
    let raw_dir = raw_dir.as_ref();
    if raw_dir.join("test.jsonl").is_file() {
        log::warn!("ignoring {}: only train and dev are used", raw_dir.join("test.jsonl").display());
    }
    let mut out = ReformatOutput::default();
    for (split, path) in split_files(raw_dir, &[Split::Train, Split::Dev])? {
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let file_name = path.display().to_string();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let drop = |qid: Option<String>, aid: Option<String>, reason: String| DropEntry {
                source: SOURCE.into(),
                file: file_name.clone(),
                line: n + 1,
                question_id: qid,
                answer_id: aid,
                reason,
            };
            let raw: RawQuestion = match serde_json::from_str(&line) {
                Ok(r) => r,
                Err(e) => {
                    out.reject(drop(None, None, format!("malformed raw record: {e}")));
                    continue;
                }
            };
            let qid = id_string(&raw.query_id);
            if raw.answers.is_empty() {
                out.reject(drop(Some(qid), None, "question has no answers".into()));
                continue;
            }
            for (k, answer) in raw.answers.iter().enumerate() {
                let aid = format!("{qid}-{k}");
                match convert(&raw, &qid, answer, &aid, split) {
                    Ok(record) => out.accept(record),
                    Err(reason) => out.reject(drop(Some(qid.clone()), Some(aid), reason)),
                }
            }
        }
    }
    Ok(out)
}

fn convert(
    raw: &RawQuestion,
    qid: &str,
    answer: &RawAnswer,
    answer_id: &str,
    split: Split,
) -> std::result::Result<CanonicalRecord, String> {
    let mut builder = DocumentBuilder::new();
    let mut by_idx: HashMap<usize, usize> = HashMap::new();
    for q in &raw.quotes {
        let pos = builder
            .push(&q.text)
            .ok_or_else(|| format!("passage [{}] has empty text", q.idx))?;
        if by_idx.insert(q.idx, pos).is_some() {
            return Err(format!("passage index [{}] is listed twice", q.idx));
        }
    }
    if builder.is_empty() {
        return Err("question has no passages".into());
    }

    let raw_sentences: Vec<(String, bool)> = match &answer.sentences {
        Some(list) if !list.is_empty() => list
            .iter()
            .map(|s| (s.text.clone(), attributable(&s.attributable)))
            .collect(),
        _ => segment_sentences(&answer.answer)
            .into_iter()
            .map(|s| (s, true))
            .collect(),
    };

    let mut sentences = Vec::new();
    for (raw_text, is_attributable) in raw_sentences {
        let (text, cited) = strip_citation_markers(&raw_text);
        let mut gold = Vec::new();
        for n in cited {
            let idx = *by_idx
                .get(&n)
                .ok_or_else(|| format!("citation [{n}] points at an unlisted passage"))?;
            gold.push(idx);
        }
        if text.is_empty() {
            continue;
        }
        if !is_attributable {
            gold.clear();
        }
        let index = sentences.len();
        sentences.push(AnswerSentence::new(index, &text, gold).map_err(|e| e.to_string())?);
    }

    let document = builder.build(qid).map_err(|e| e.to_string())?;
    let answer = AnswerRecord::new(qid, &raw.query, answer_id, sentences).map_err(|e| e.to_string())?;
    CanonicalRecord::new(split, document, answer).map_err(|e| e.to_string())
}
