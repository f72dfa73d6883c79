//! Canonical dataset schema, source-corpus reformatters and statistics.

mod canonical;
pub mod hagrid;
mod stats;
pub mod synthetic;
pub mod verifiability;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub use canonical::{read_canonical, write_canonical, CanonicalRecord, DocumentBuilder, Split};
pub use hagrid::reformat_hagrid;
pub use stats::{compute_stats, DatasetStats};
pub use verifiability::reformat_verifiability;

pub(crate) use canonical::write_jsonl;

use crate::error::{Error, Result};

/// A raw record the reformatter refused, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropEntry {
    pub source: String,
    pub file: String,
    pub line: usize,
    pub question_id: Option<String>,
    pub answer_id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ReformatOutput {
    pub records: Vec<CanonicalRecord>,
    pub dropped: Vec<DropEntry>,
    /// Raw answers seen; always `records.len() + dropped.len()`.
    pub seen: usize,
}

impl ReformatOutput {
    fn accept(&mut self, record: CanonicalRecord) {
        self.seen += 1;
        self.records.push(record);
    }

    fn reject(&mut self, entry: DropEntry) {
        log::info!(
            "dropping {}:{} ({}): {}",
            entry.file,
            entry.line,
            entry.answer_id.as_deref().unwrap_or("?"),
            entry.reason
        );
        self.seen += 1;
        self.dropped.push(entry);
    }
}

/// Appends entries to a JSONL drop log.
pub fn append_drop_log(entries: &[DropEntry], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    for e in entries {
        let line = serde_json::to_string(e).expect("drop entry serializes");
        writeln!(file, "{line}").map_err(|err| Error::io(path, err))?;
    }
    Ok(())
}

fn marker_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\s*\[(\d+(?:\s*,\s*\d+)*)\]").expect("valid regex"))
}

/// Removes inline `[n]` / `[n, m]` markers, returning the cleaned text and
/// the cited numbers in order of appearance.
pub fn strip_citation_markers(text: &str) -> (String, Vec<usize>) {
    let mut cited = Vec::new();
    for cap in marker_regex().captures_iter(text) {
        for n in cap[1].split(',') {
            if let Ok(n) = n.trim().parse() {
                cited.push(n);
            }
        }
    }
    let cleaned = marker_regex().replace_all(text, "");
    (crate::text::collapse_whitespace(&cleaned), cited)
}

/// Split files present under `raw_dir`, in split order. Errors when the
/// directory is missing or holds none of the expected files.
fn split_files(raw_dir: &Path, splits: &[Split]) -> Result<Vec<(Split, PathBuf)>> {
    if !raw_dir.is_dir() {
        return Err(Error::io(
            raw_dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "raw dataset directory not found"),
        ));
    }
    let found: Vec<(Split, PathBuf)> = splits
        .iter()
        .map(|&s| (s, raw_dir.join(format!("{s}.jsonl"))))
        .filter(|(_, p)| p.is_file())
        .collect();
    if found.is_empty() {
        let expected = raw_dir.join(format!("{}.jsonl", splits[0]));
        return Err(Error::io(
            expected,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no split files found"),
        ));
    }
    Ok(found)
}
