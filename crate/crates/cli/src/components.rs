//! Concrete backends instantiated from a [`PipelineConfig`].

use std::sync::Arc;

use attrib_core::attribute::{HttpEntailmentScorer, PruneSpec};
use attrib_core::decompose::{DecompositionCache, HttpCompletion, LlmDecomposer, LlmStats};
use attrib_core::retrieval::{
    EmbeddingScorer, HashingEmbedder, HttpEmbedder, HttpRelevanceScorer, JaccardRelevance, Ranker, RelevanceScorer,
};
use attrib_core::{Decomposer, EntailmentScorer, IdentityDecomposer, LexicalEntailmentProxy, Pipeline};

use crate::config::{Backend, DecomposerKind, PipelineConfig, RankerKind, ScorerKind};
use crate::error::CliError;

pub struct Components {
    config: PipelineConfig,
    identity: IdentityDecomposer,
    llm: Option<LlmDecomposer>,
    scorer: Box<dyn EntailmentScorer>,
    embedder: Box<dyn EmbeddingScorer>,
    relevance: Box<dyn RelevanceScorer>,
}

impl Components {
    pub fn build(config: &PipelineConfig) -> Result<Self, CliError> {
        let llm = match config.decomposer.kind {
            DecomposerKind::Identity => None,
            DecomposerKind::Llm => {
                let section = &config.decomposer;
                let endpoint = section.endpoint.clone().expect("validated");
                let model = section.model.clone().expect("validated");
                let api_key = section.api_key_env.as_ref().and_then(|var| match std::env::var(var) {
                    Ok(key) => Some(key),
                    Err(_) => {
                        log::warn!("environment variable {var} is not set; calling the LLM without a key");
                        None
                    }
                });
                let cache = match &config.cache_path {
                    Some(path) => Some(Arc::new(DecompositionCache::open(path)?)),
                    None => {
                        log::warn!("no cache_path configured; decompositions will not be reproducible across runs");
                        None
                    }
                };
                let backend = Arc::new(HttpCompletion::new(endpoint, model, api_key));
                Some(LlmDecomposer::new(backend, cache))
            }
        };
        let scorer: Box<dyn EntailmentScorer> = match config.scorer.kind {
            ScorerKind::LexicalProxy => Box::new(LexicalEntailmentProxy),
            ScorerKind::NliService => Box::new(HttpEntailmentScorer::new(
                config.scorer.endpoint.clone().expect("validated"),
                config.scorer.batch_size,
            )),
        };
        let embedder: Box<dyn EmbeddingScorer> = match config.dense.backend {
            Backend::Local => Box::new(HashingEmbedder::default()),
            Backend::Service => Box::new(HttpEmbedder::new(
                config.dense.endpoint.clone().expect("validated"),
                config.dense.batch_size,
            )),
        };
        let relevance: Box<dyn RelevanceScorer> = match config.pairwise.backend {
            Backend::Local => Box::new(JaccardRelevance),
            Backend::Service => Box::new(HttpRelevanceScorer::new(
                config.pairwise.endpoint.clone().expect("validated"),
                config.pairwise.batch_size,
            )),
        };
        Ok(Components {
            config: config.clone(),
            identity: IdentityDecomposer,
            llm,
            scorer,
            embedder,
            relevance,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn decomposer(&self) -> &dyn Decomposer {
        match &self.llm {
            Some(llm) => llm,
            None => &self.identity,
        }
    }

    pub fn llm_stats(&self) -> LlmStats {
        self.llm.as_ref().map(LlmDecomposer::stats).unwrap_or_default()
    }

    pub fn ranker(&self, kind: RankerKind) -> Ranker<'_> {
        match kind {
            RankerKind::Bm25 => Ranker::Bm25(self.config.bm25),
            RankerKind::Dense => Ranker::Dense(self.embedder.as_ref()),
            RankerKind::Pairwise => Ranker::Pairwise(self.relevance.as_ref()),
        }
    }

    pub fn pipeline(&self) -> Pipeline<'_> {
        Pipeline {
            decomposer: self.decomposer(),
            scorer: self.scorer.as_ref(),
            mode: self.config.selection,
            selection: self.config.thresholds,
            prune: self.config.prune.map(|p| PruneSpec {
                ranker: self.ranker(p.ranker),
                limit: p.limit,
            }),
            call_budget: self.config.call_budget,
        }
    }
}
