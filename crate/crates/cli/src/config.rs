//! Declarative pipeline configuration (TOML).

use std::path::{Path, PathBuf};

use attrib_core::attribute::SelectionMode;
use attrib_core::http::EndpointConfig;
use attrib_core::retrieval::Bm25Params;
use attrib_core::SelectionConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_PRUNE_LIMIT: usize = 150;
pub const DEFAULT_CALL_BUDGET: u64 = 10_000;
pub const DEFAULT_BATCH_SIZE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// Decomposition plus entailment-scored selection.
    #[default]
    Attribution,
    /// Rank source sentences against each answer sentence and keep the top.
    Retrieval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecomposerKind {
    #[default]
    Identity,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerKind {
    #[default]
    LexicalProxy,
    NliService,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankerKind {
    #[default]
    Bm25,
    Dense,
    Pairwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Remote service at `endpoint`.
    Service,
    /// Deterministic offline stand-in.
    #[default]
    Local,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecomposerSection {
    pub kind: DecomposerKind,
    pub model: Option<String>,
    /// Name of the environment variable holding the API key.
    pub api_key_env: Option<String>,
    pub endpoint: Option<EndpointConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScorerSection {
    pub kind: ScorerKind,
    pub batch_size: usize,
    pub endpoint: Option<EndpointConfig>,
}

impl Default for ScorerSection {
    fn default() -> Self {
        ScorerSection {
            kind: ScorerKind::default(),
            batch_size: DEFAULT_BATCH_SIZE,
            endpoint: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PruneSection {
    pub ranker: RankerKind,
    pub limit: usize,
}

impl Default for PruneSection {
    fn default() -> Self {
        PruneSection {
            ranker: RankerKind::Bm25,
            limit: DEFAULT_PRUNE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetrievalSection {
    pub ranker: RankerKind,
    /// Attributions kept per answer sentence.
    pub keep: usize,
}

impl Default for RetrievalSection {
    fn default() -> Self {
        RetrievalSection {
            ranker: RankerKind::Bm25,
            keep: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServiceSection {
    pub backend: Backend,
    pub batch_size: usize,
    pub endpoint: Option<EndpointConfig>,
}

impl Default for ServiceSection {
    fn default() -> Self {
        ServiceSection {
            backend: Backend::Local,
            batch_size: DEFAULT_BATCH_SIZE,
            endpoint: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub system: SystemKind,
    pub selection: SelectionMode,
    /// Decomposition cache; relative paths resolve against the config file.
    pub cache_path: Option<PathBuf>,
    pub call_budget: Option<u64>,
    pub workers: usize,
    pub decomposer: DecomposerSection,
    pub scorer: ScorerSection,
    pub thresholds: SelectionConfig,
    pub prune: Option<PruneSection>,
    pub retrieval: RetrievalSection,
    pub bm25: Bm25Params,
    pub dense: ServiceSection,
    pub pairwise: ServiceSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            system: SystemKind::Attribution,
            selection: SelectionMode::Optimal,
            cache_path: None,
            call_budget: Some(DEFAULT_CALL_BUDGET),
            workers: 1,
            decomposer: DecomposerSection::default(),
            scorer: ScorerSection::default(),
            thresholds: SelectionConfig::default(),
            prune: None,
            retrieval: RetrievalSection::default(),
            bm25: Bm25Params::default(),
            dense: ServiceSection::default(),
            pairwise: ServiceSection::default(),
        }
    }
}

fn need_endpoint(endpoint: &Option<EndpointConfig>, what: &str) -> Result<(), CliError> {
    match endpoint {
        Some(e) if !e.url.trim().is_empty() => Ok(()),
        _ => Err(CliError::usage(format!("{what} requires an endpoint url"))),
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| CliError::usage(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads and validates a config file, resolving `cache_path` against
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| e.context(path.display().to_string()))?;
        if let Some(cache) = &cfg.cache_path {
            if cache.is_relative() {
                let base = path.parent().unwrap_or_else(|| Path::new(""));
                cfg.cache_path = Some(base.join(cache));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let invalid = |e: attrib_core::Error| CliError::usage(e.to_string());
        if self.workers == 0 {
            return Err(CliError::usage("workers must be at least 1"));
        }
        self.thresholds.validate().map_err(invalid)?;
        self.bm25.validate().map_err(invalid)?;
        if self.call_budget == Some(0) {
            return Err(CliError::usage("call_budget must be positive"));
        }
        if self.decomposer.kind == DecomposerKind::Llm {
            need_endpoint(&self.decomposer.endpoint, "decomposer kind \"llm\"")?;
            if !self.decomposer.model.as_deref().is_some_and(|m| !m.trim().is_empty()) {
                return Err(CliError::usage("decomposer kind \"llm\" requires a model"));
            }
        }
        if self.scorer.kind == ScorerKind::NliService {
            need_endpoint(&self.scorer.endpoint, "scorer kind \"nli_service\"")?;
        }
        if self.scorer.batch_size == 0 || self.dense.batch_size == 0 || self.pairwise.batch_size == 0 {
            return Err(CliError::usage("batch_size must be positive"));
        }
        if self.dense.backend == Backend::Service {
            need_endpoint(&self.dense.endpoint, "dense backend \"service\"")?;
        }
        if self.pairwise.backend == Backend::Service {
            need_endpoint(&self.pairwise.endpoint, "pairwise backend \"service\"")?;
        }
        if self.prune.is_some_and(|p| p.limit == 0) {
            return Err(CliError::usage("prune limit must be positive"));
        }
        if self.retrieval.keep == 0 {
            return Err(CliError::usage("retrieval keep must be positive"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, so formatting changes in the file
    /// do not change the hash.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    /// Short human-readable system name.
    pub fn describe(&self) -> String {
        match self.system {
            SystemKind::Retrieval => format!("retrieval/{:?}", self.retrieval.ranker).to_lowercase(),
            SystemKind::Attribution => format!(
                "{}+{}+{}",
                match self.decomposer.kind {
                    DecomposerKind::Identity => "identity",
                    DecomposerKind::Llm => "llm",
                },
                match self.selection {
                    SelectionMode::Optimal => "optimal",
                    SelectionMode::Ranked => "ranked",
                },
                match self.scorer.kind {
                    ScorerKind::LexicalProxy => "lexical_proxy",
                    ScorerKind::NliService => "nli_service",
                }
            ),
        }
    }
}
