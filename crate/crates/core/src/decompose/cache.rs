//! Append-only JSONL cache of decompositions.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ensure_nonempty;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionCacheEntry {
    pub key: String,
    pub units: Vec<String>,
    pub created_at: DateTime<Utc>,
}

/// SHA-256 over the JSON array `[decomposer, model, template, sentence]`.
pub fn cache_key(decomposer_id: &str, model_id: &str, template_version: &str, sentence: &str) -> String {
    let material = serde_json::to_vec(&[decomposer_id, model_id, template_version, sentence])
        .expect("string array serializes");
    hex::encode(Sha256::digest(material))
}

/// Entries are loaded once at open; stores append a line and update the
/// in-memory view. Reads are concurrent, writes are serialized.
#[derive(Debug)]
pub struct DecompositionCache {
    path: PathBuf,
    entries: RwLock<HashMap<String, DecompositionCacheEntry>>,
    writer: Mutex<Option<File>>,
}

impl DecompositionCache {
    /// A missing file is an empty cache; an unreadable or malformed one is an
    /// error.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        match File::open(&path) {
            Ok(file) => {
                for (n, line) in BufReader::new(file).lines().enumerate() {
                    let line = line.map_err(|e| Error::io(&path, e))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let entry: DecompositionCacheEntry =
                        serde_json::from_str(&line).map_err(|e| Error::Parse {
                            path: path.clone(),
                            line: n + 1,
                            message: e.to_string(),
                        })?;
                    ensure_nonempty(&entry.units, &entry.key).map_err(|e| Error::Parse {
                        path: path.clone(),
                        line: n + 1,
                        message: e.to_string(),
                    })?;
                    // Later lines win.
                    entries.insert(entry.key.clone(), entry);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(Error::io(&path, e)),
        }
        Ok(DecompositionCache {
            path,
            entries: RwLock::new(entries),
            writer: Mutex::new(None),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lookup(&self, key: &str) -> Option<DecompositionCacheEntry> {
        self.entries.read().expect("cache lock").get(key).cloned()
    }

    pub fn store(&self, entry: DecompositionCacheEntry) -> Result<()> {
        ensure_nonempty(&entry.units, &entry.key)?;
        let line = serde_json::to_string(&entry).expect("cache entry serializes");
        let mut writer = self.writer.lock().expect("cache writer lock");
        if writer.is_none() {
            if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&self.path)
                .map_err(|e| Error::io(&self.path, e))?;
            *writer = Some(file);
        }
        let file = writer.as_mut().expect("writer opened above");
        writeln!(file, "{line}")
            .and_then(|_| file.flush())
            .map_err(|e| Error::io(&self.path, e))?;
        self.entries
            .write()
            .expect("cache lock")
            .insert(entry.key.clone(), entry);
        Ok(())
    }
}
