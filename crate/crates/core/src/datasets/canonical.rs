use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::normalize;
use crate::types::{AnswerRecord, AnswerSentence, SourceDocument, SourceSentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One (question, document, answer, gold) instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalRecord {
    pub split: Split,
    document: SourceDocument,
    answer: AnswerRecord,
}

impl CanonicalRecord {
    /// Checks that question ids agree, gold indices resolve and document
    /// sentences are distinct after normalization.
    pub fn new(split: Split, document: SourceDocument, answer: AnswerRecord) -> Result<Self> {
        if document.question_id() != answer.question_id {
            return Err(Error::Invalid(format!(
                "document question {} does not match answer question {}",
                document.question_id(),
                answer.question_id
            )));
        }
        let mut seen = HashSet::new();
        for s in document.sentences() {
            if !seen.insert(normalize(&s.text)) {
                return Err(Error::Invalid(format!(
                    "answer {}: document sentence {} duplicates an earlier sentence",
                    answer.answer_id, s.index
                )));
            }
        }
        for s in answer.sentences() {
            if let Some(bad) = s.gold_attributions.iter().find(|g| !document.contains_index(**g)) {
                return Err(Error::Invalid(format!(
                    "answer {} sentence {}: gold attribution {bad} is not a document sentence",
                    answer.answer_id, s.index
                )));
            }
        }
        Ok(CanonicalRecord {
            split,
            document,
            answer,
        })
    }

    pub fn question_id(&self) -> &str {
        &self.answer.question_id
    }

    pub fn answer_id(&self) -> &str {
        &self.answer.answer_id
    }

    pub fn question(&self) -> &str {
        &self.answer.question
    }

    pub fn document(&self) -> &SourceDocument {
        &self.document
    }

    pub fn answer(&self) -> &AnswerRecord {
        &self.answer
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordWire {
    question_id: String,
    answer_id: String,
    question: String,
    split: Split,
    document: DocumentWire,
    answer: AnswerWire,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentWire {
    sentences: Vec<SourceSentence>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerWire {
    sentences: Vec<AnswerSentence>,
}

impl TryFrom<RecordWire> for CanonicalRecord {
    type Error = Error;

    fn try_from(w: RecordWire) -> Result<Self> {
        let document = SourceDocument::new(w.question_id.clone(), w.document.sentences)?;
        let answer = AnswerRecord::new(w.question_id, w.question, w.answer_id, w.answer.sentences)?;
        CanonicalRecord::new(w.split, document, answer)
    }
}

impl From<&CanonicalRecord> for RecordWire {
    fn from(r: &CanonicalRecord) -> Self {
        RecordWire {
            question_id: r.question_id().to_string(),
            answer_id: r.answer_id().to_string(),
            question: r.question().to_string(),
            split: r.split,
            document: DocumentWire {
                sentences: r.document.sentences().to_vec(),
            },
            answer: AnswerWire {
                sentences: r.answer.sentences().to_vec(),
            },
        }
    }
}

impl Serialize for CanonicalRecord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RecordWire::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CanonicalRecord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = RecordWire::deserialize(deserializer)?;
        CanonicalRecord::try_from(wire).map_err(serde::de::Error::custom)
    }
}

/// Reads one record per line. Blank lines are skipped; anything else that
/// fails to parse or validate is an error naming the line.
pub fn read_canonical(path: impl AsRef<Path>) -> Result<Vec<CanonicalRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_canonical(records: &[CanonicalRecord], path: impl AsRef<Path>) -> Result<()> {
    write_jsonl(records, path)
}

pub(crate) fn write_jsonl<T: Serialize>(items: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Builds a document whose sentences are distinct after normalization;
/// re-adding a known sentence returns its existing index.
#[derive(Debug, Default)]
pub struct DocumentBuilder {
    texts: Vec<String>,
    by_norm: HashMap<String, usize>,
}

impl DocumentBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `None` for blank text.
    pub fn push(&mut self, text: &str) -> Option<usize> {
        let text = crate::text::collapse_whitespace(text);
        if text.is_empty() {
            return None;
        }
        let key = normalize(&text);
        if let Some(&i) = self.by_norm.get(&key) {
            return Some(i);
        }
        let i = self.texts.len();
        self.texts.push(text);
        self.by_norm.insert(key, i);
        Some(i)
    }

    pub fn find(&self, text: &str) -> Option<usize> {
        self.by_norm.get(&normalize(text)).copied()
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    pub fn build(self, question_id: &str) -> Result<SourceDocument> {
        SourceDocument::from_texts(question_id, &self.texts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> CanonicalRecord {
        let doc = SourceDocument::from_texts("q1", &["A is B.", "C is D."]).unwrap();
        let ans = AnswerRecord::new(
            "q1",
            "What?",
            "q1-0",
            vec![
                AnswerSentence::new(0, "A is B indeed.", [0]).unwrap(),
                AnswerSentence::new(1, "Nothing here.", []).unwrap(),
            ],
        )
        .unwrap();
        CanonicalRecord::new(Split::Dev, doc, ans).unwrap()
    }

    #[test]
    fn json_field_names_are_exact() {
        let v = serde_json::to_value(record()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, vec!["answer", "answer_id", "document", "question", "question_id", "split"]);
        assert_eq!(v["split"], "dev");
        assert_eq!(v["document"]["sentences"][1], serde_json::json!({"index": 1, "text": "C is D."}));
        assert_eq!(
            v["answer"]["sentences"][0],
            serde_json::json!({"index": 0, "text": "A is B indeed.", "gold_attributions": [0]})
        );
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out/data.jsonl");
        let records = vec![record(), record()];
        write_canonical(&records, &path).unwrap();
        assert_eq!(read_canonical(&path).unwrap(), records);
    }

    #[test]
    fn empty_file_is_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(read_canonical(&path).unwrap().is_empty());
    }

    #[test]
    fn truncated_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        let good = serde_json::to_string(&record()).unwrap();
        std::fs::write(&path, format!("{good}\n{}\n", &good[..good.len() / 2])).unwrap();
        let err = read_canonical(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains(":2:"));
    }

    #[test]
    fn invariants_are_checked_on_read() {
        let mut v = serde_json::to_value(record()).unwrap();
        v["answer"]["sentences"][1]["gold_attributions"] = serde_json::json!([5]);
        assert!(serde_json::from_value::<CanonicalRecord>(v).is_err());

        let mut v = serde_json::to_value(record()).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(serde_json::from_value::<CanonicalRecord>(v).is_err());

        let mut v = serde_json::to_value(record()).unwrap();
        v["document"]["sentences"][1]["text"] = serde_json::json!("a IS b.");
        assert!(serde_json::from_value::<CanonicalRecord>(v).is_err());

        let mut v = serde_json::to_value(record()).unwrap();
        v["split"] = serde_json::json!("validation");
        assert!(serde_json::from_value::<CanonicalRecord>(v).is_err());
    }

    #[test]
    fn builder_merges_normalized_duplicates() {
        let mut b = DocumentBuilder::new();
        assert_eq!(b.push("One  thing."), Some(0));
        assert_eq!(b.push("Two."), Some(1));
        assert_eq!(b.push("ONE thing."), Some(0));
        assert_eq!(b.push("   "), None);
        assert_eq!(b.find("two."), Some(1));
        let doc = b.build("q").unwrap();
        assert_eq!(doc.sentences()[0].text, "One thing.");
        assert_eq!(doc.len(), 2);
    }
}
