use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::http::{EndpointConfig, JsonClient};
use crate::par;
use crate::retrieval::tokenize;

/// Probability that `premise` entails `hypothesis`, in [0, 1].
///
/// Implementations must be deterministic for a fixed pair within a run.
pub trait EntailmentScorer: Send + Sync {
    fn score(&self, premise: &str, hypothesis: &str) -> Result<f64>;

    /// Scores many pairs, preserving order. The default fans out over
    /// [`par::try_map`]; remote scorers override it to batch requests.
    fn score_batch(&self, pairs: &[(String, String)]) -> Result<Vec<f64>> {
        par::try_map(pairs, |(p, h)| self.score(p, h))
    }
}

/// Offline stand-in for an NLI model: the fraction of the hypothesis'
/// unique tokens that also occur in the premise.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalEntailmentProxy;

pub fn lexical_entailment_proxy(premise: &str, hypothesis: &str) -> f64 {
    let hyp: HashSet<String> = tokenize(hypothesis).into_iter().collect();
    if hyp.is_empty() {
        return 0.0;
    }
    let prem: HashSet<String> = tokenize(premise).into_iter().collect();
    hyp.intersection(&prem).count() as f64 / hyp.len() as f64
}

impl EntailmentScorer for LexicalEntailmentProxy {
    fn score(&self, premise: &str, hypothesis: &str) -> Result<f64> {
        Ok(lexical_entailment_proxy(premise, hypothesis))
    }
}

#[derive(Serialize)]
struct NliPair<'a> {
    premise: &'a str,
    hypothesis: &'a str,
}

#[derive(Serialize)]
struct NliRequest<'a> {
    pairs: Vec<NliPair<'a>>,
}

#[derive(Deserialize)]
struct NliResponse {
    probabilities: Vec<f64>,
}

/// Client for an entailment service:
/// `POST {"pairs": [{"premise", "hypothesis"}, ...]}` → `{"probabilities": [...]}`.
#[derive(Debug, Clone)]
pub struct HttpEntailmentScorer {
    client: JsonClient,
    batch_size: usize,
}

impl HttpEntailmentScorer {
    pub fn new(endpoint: EndpointConfig, batch_size: usize) -> Self {
        HttpEntailmentScorer {
            client: JsonClient::new(endpoint),
            batch_size: batch_size.max(1),
        }
    }

    pub fn url(&self) -> &str {
        self.client.url()
    }
}

impl EntailmentScorer for HttpEntailmentScorer {
    fn score(&self, premise: &str, hypothesis: &str) -> Result<f64> {
        let out = self.score_batch(&[(premise.to_string(), hypothesis.to_string())])?;
        Ok(out[0])
    }

    fn score_batch(&self, pairs: &[(String, String)]) -> Result<Vec<f64>> {
        let chunks: Vec<&[(String, String)]> = pairs.chunks(self.batch_size).collect();
        let scored = par::try_map(&chunks, |chunk| {
            let req = NliRequest {
                pairs: chunk
                    .iter()
                    .map(|(p, h)| NliPair { premise: p, hypothesis: h })
                    .collect(),
            };
            let resp: NliResponse = self.client.post(&req)?;
            if resp.probabilities.len() != chunk.len() {
                return Err(Error::Remote {
                    endpoint: self.client.url().to_string(),
                    message: format!(
                        "expected {} probabilities, got {}",
                        chunk.len(),
                        resp.probabilities.len()
                    ),
                });
            }
            Ok(resp.probabilities)
        })?;
        Ok(scored.into_iter().flatten().collect())
    }
}

/// Counts scored pairs and enforces an optional cap on them.
pub struct CountingScorer<'a> {
    inner: &'a dyn EntailmentScorer,
    calls: AtomicU64,
    budget: Option<u64>,
}

impl<'a> CountingScorer<'a> {
    pub fn new(inner: &'a dyn EntailmentScorer, budget: Option<u64>) -> Self {
        CountingScorer {
            inner,
            calls: AtomicU64::new(0),
            budget,
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    fn reserve(&self, n: u64) -> Result<()> {
        let Some(budget) = self.budget else {
            self.calls.fetch_add(n, Ordering::SeqCst);
            return Ok(());
        };
        self.calls
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |c| {
                (c + n <= budget).then_some(c + n)
            })
            .map(|_| ())
            .map_err(|_| Error::Budget { budget })
    }
}

impl EntailmentScorer for CountingScorer<'_> {
    fn score(&self, premise: &str, hypothesis: &str) -> Result<f64> {
        self.reserve(1)?;
        self.inner.score(premise, hypothesis)
    }

    fn score_batch(&self, pairs: &[(String, String)]) -> Result<Vec<f64>> {
        self.reserve(pairs.len() as u64)?;
        self.inner.score_batch(pairs)
    }
}
