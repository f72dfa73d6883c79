//! Citation-verifiability corpus → canonical records.
//!
//! Expected raw layout: `train.jsonl`, `dev.jsonl`, `test.jsonl` (any
//! subset) in one directory, one answer per line:
//!
//! ```json
//! {"question_id": "q1", "question": "...", "answer_id": "bing-q1",
//!  "sentences": [
//!    {"text": "Answer sentence [1].",
//!     "citations": [{"page_id": "p1", "judgment": "full",
//!                    "supporting_sentences": ["Sentence copied from p1."]}]}
//!  ],
//!  "pages": [{"page_id": "p1", "content": "Full page text ..."}]}
//! ```
//!
//! `judgment` is one of `full`, `partial`, `none`. An answer is kept only
//! when every citation in it is judged fully supporting. The document is
//! the segmented contents of the cited pages in order of first citation,
//! with duplicate sentences merged. Supporting sentences are aligned by
//! normalized exact match; an answer with an unalignable supporting
//! sentence is dropped.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use super::{split_files, strip_citation_markers, CanonicalRecord, DocumentBuilder, DropEntry, ReformatOutput, Split};
use crate::error::{Error, Result};
use crate::text::segment_sentences;
use crate::types::{AnswerRecord, AnswerSentence};

const SOURCE: &str = "verifiability";

#[derive(Debug, Deserialize)]
pub struct RawAnswer {
    pub question_id: String,
    pub question: String,
    #[serde(default)]
    pub answer_id: Option<String>,
    pub sentences: Vec<RawSentence>,
    #[serde(default)]
    pub pages: Vec<RawPage>,
}

#[derive(Debug, Deserialize)]
pub struct RawSentence {
    pub text: String,
    #[serde(default)]
    pub citations: Vec<RawCitation>,
}

#[derive(Debug, Deserialize)]
pub struct RawCitation {
    pub page_id: String,
    pub judgment: Judgment,
    #[serde(default)]
    pub supporting_sentences: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Judgment {
    #[serde(alias = "fully")]
    Full,
    #[serde(alias = "partially")]
    Partial,
    #[serde(alias = "no")]
    None,
}

#[derive(Debug, Deserialize)]
pub struct RawPage {
    pub page_id: String,
    pub content: String,
}

pub fn reformat_verifiability(raw_dir: impl AsRef<Path>) -> Result<ReformatOutput> {
    let mut out = ReformatOutput::default();
    for (split, path) in split_files(raw_dir.as_ref(), &Split::ALL)? {
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
            let raw: RawAnswer = match serde_json::from_str(&line) {
                Ok(r) => r,
                Err(e) => {
                    out.reject(drop(None, None, format!("malformed raw record: {e}")));
                    continue;
                }
            };
            let answer_id = raw
                .answer_id
                .clone()
                .unwrap_or_else(|| format!("{}-{}", raw.question_id, n + 1));
            match convert(&raw, &answer_id, split) {
                Ok(record) => out.accept(record),
                Err(reason) => out.reject(drop(Some(raw.question_id.clone()), Some(answer_id), reason)),
            }
        }
    }
    Ok(out)
}

fn convert(raw: &RawAnswer, answer_id: &str, split: Split) -> std::result::Result<CanonicalRecord, String> {
    let citations: Vec<&RawCitation> = raw.sentences.iter().flat_map(|s| &s.citations).collect();
    if citations.is_empty() {
        return Err("answer has no citations".into());
    }
    if let Some(c) = citations.iter().find(|c| c.judgment != Judgment::Full) {
        return Err(format!(
            "citation of page {} is judged {:?}, not fully supporting",
            c.page_id, c.judgment
        ));
    }

    let pages: HashMap<&str, &str> = raw
        .pages
        .iter()
        .map(|p| (p.page_id.as_str(), p.content.as_str()))
        .collect();
    let mut order: Vec<&str> = Vec::new();
    for c in &citations {
        if !order.contains(&c.page_id.as_str()) {
            order.push(&c.page_id);
        }
    }
    let mut builder = DocumentBuilder::new();
    for page_id in &order {
        let content = pages
            .get(page_id)
            .ok_or_else(|| format!("cited page {page_id} has no content"))?;
        for sentence in segment_sentences(content) {
            builder.push(&sentence);
        }
    }
    if builder.is_empty() {
        return Err("pseudo-document is empty".into());
    }

    let mut sentences = Vec::new();
    for s in &raw.sentences {
        let (text, _) = strip_citation_markers(&s.text);
        if text.is_empty() {
            continue;
        }
        let mut gold = Vec::new();
        for c in &s.citations {
            for support in &c.supporting_sentences {
                for piece in segment_sentences(support) {
                    let idx = builder.find(&piece).ok_or_else(|| {
                        format!("supporting sentence {piece:?} not found in pseudo-document")
                    })?;
                    gold.push(idx);
                }
            }
        }
        let index = sentences.len();
        sentences.push(AnswerSentence::new(index, &text, gold).map_err(|e| e.to_string())?);
    }

    let document = builder.build(&raw.question_id).map_err(|e| e.to_string())?;
    let answer = AnswerRecord::new(&raw.question_id, &raw.question, answer_id, sentences)
        .map_err(|e| e.to_string())?;
    CanonicalRecord::new(split, document, answer).map_err(|e| e.to_string())
}
