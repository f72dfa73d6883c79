use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A record the pipeline could not attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordFailure {
    pub question_id: String,
    pub answer_id: String,
    pub message: String,
}

/// Written next to every predictions file as `<predictions>.manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub system: String,
    pub config_path: PathBuf,
    pub config_sha256: String,
    pub dataset_path: PathBuf,
    pub dataset_sha256: String,
    pub predictions_path: PathBuf,
    pub versions: BTreeMap<String, String>,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub workers: usize,
    pub limit: Option<usize>,
    pub records_total: usize,
    pub records_succeeded: usize,
    pub records_failed: usize,
    pub failures: Vec<RecordFailure>,
    /// Entailment-scorer invocations summed over records.
    pub scorer_calls: u64,
    pub max_scorer_calls_per_record: u64,
    pub llm_calls: u64,
    pub cache_hits: u64,
}

impl RunManifest {
    pub fn path_for(predictions: &Path) -> PathBuf {
        sidecar(predictions, ".manifest.json")
    }

    pub fn write(&self) -> Result<PathBuf, CliError> {
        let path = Self::path_for(&self.predictions_path);
        let json = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        std::fs::write(&path, json).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
    }
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

/// Path with `suffix` appended to the full file name.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}
