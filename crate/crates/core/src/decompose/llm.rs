use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use chrono::Utc;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{cache_key, DecompositionCache, DecompositionCacheEntry, Decomposer};
use crate::error::Result;
use crate::http::{EndpointConfig, JsonClient};

/// The prompt is this prefix followed by the sentence, verbatim.
pub const PROMPT_PREFIX: &str = "Please breakdown the following sentence into independent facts: ";

/// Bumped whenever the prompt or [`parse_response`] changes, so cached
/// decompositions from older versions are not reused.
pub const TEMPLATE_VERSION: &str = "prompt-1/parser-1";

/// A text-completion backend.
pub trait Completion: Send + Sync {
    fn model(&self) -> &str;

    fn complete(&self, prompt: &str) -> Result<String>;
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    temperature: f64,
}

#[derive(Deserialize)]
struct CompletionResponse {
    text: String,
}

/// `POST {"model", "prompt", "temperature"}` → `{"text"}`.
#[derive(Debug, Clone)]
pub struct HttpCompletion {
    client: JsonClient,
    model: String,
    temperature: f64,
}

impl HttpCompletion {
    pub fn new(endpoint: EndpointConfig, model: impl Into<String>, api_key: Option<String>) -> Self {
        HttpCompletion {
            client: JsonClient::new(endpoint).with_bearer(api_key),
            model: model.into(),
            temperature: 0.0,
        }
    }
}

impl Completion for HttpCompletion {
    fn model(&self) -> &str {
        &self.model
    }

    fn complete(&self, prompt: &str) -> Result<String> {
        let resp: CompletionResponse = self.client.post(&CompletionRequest {
            model: &self.model,
            prompt,
            temperature: self.temperature,
        })?;
        Ok(resp.text)
    }
}

fn list_marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(?:[-*\u{2022}]|\d+[.)])\s*").expect("valid regex"))
}

/// One unit per non-empty line, with a leading list marker (`-`, `*`, `1.`,
/// `1)`) and surrounding whitespace removed.
pub fn parse_response(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| list_marker().replace(line.trim(), "").trim().to_string())
        .filter(|line| !line.is_empty())
        .collect()
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmStats {
    pub llm_calls: u64,
    pub cache_hits: u64,
}

/// Prompts a completion backend, consulting the cache first.
pub struct LlmDecomposer {
    backend: Arc<dyn Completion>,
    cache: Option<Arc<DecompositionCache>>,
    llm_calls: AtomicU64,
    cache_hits: AtomicU64,
}

impl LlmDecomposer {
    pub fn new(backend: Arc<dyn Completion>, cache: Option<Arc<DecompositionCache>>) -> Self {
        LlmDecomposer {
            backend,
            cache,
            llm_calls: AtomicU64::new(0),
            cache_hits: AtomicU64::new(0),
        }
    }

    pub fn stats(&self) -> LlmStats {
        LlmStats {
            llm_calls: self.llm_calls.load(Ordering::Relaxed),
            cache_hits: self.cache_hits.load(Ordering::Relaxed),
        }
    }

    pub fn prompt(sentence: &str) -> String {
        format!("{PROMPT_PREFIX}{sentence}")
    }
}

impl Decomposer for LlmDecomposer {
    fn id(&self) -> &str {
        "llm"
    }

    fn split(&self, sentence: &str) -> Result<Vec<String>> {
        let key = cache_key(self.id(), self.backend.model(), TEMPLATE_VERSION, sentence);
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.lookup(&key)) {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(hit.units);
        }
        self.llm_calls.fetch_add(1, Ordering::Relaxed);
        let raw = self.backend.complete(&Self::prompt(sentence))?;
        let mut units = parse_response(&raw);
        if units.is_empty() {
            units.push(sentence.to_string());
        }
        if let Some(cache) = &self.cache {
            cache.store(DecompositionCacheEntry {
                key,
                units: units.clone(),
                created_at: Utc::now(),
            })?;
        }
        Ok(units)
    }
}
