use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{tokenize, RankedList};
use crate::error::{Error, Result};
use crate::http::{EndpointConfig, JsonClient};
use crate::par;
use crate::types::SourceDocument;

/// Relevance probability of each text with respect to a query.
pub trait RelevanceScorer: Send + Sync {
    fn score(&self, query: &str, texts: &[String]) -> Result<Vec<f64>>;
}

pub fn pairwise_rank(
    query: &str,
    document: &SourceDocument,
    scorer: &dyn RelevanceScorer,
) -> Result<RankedList> {
    let texts: Vec<String> = document.sentences().iter().map(|s| s.text.clone()).collect();
    let scores = scorer.score(query, &texts)?;
    if scores.len() != texts.len() {
        return Err(Error::Score(format!(
            "relevance scorer returned {} scores for {} texts",
            scores.len(),
            texts.len()
        )));
    }
    let entries = document
        .sentences()
        .iter()
        .zip(scores)
        .map(|(s, p)| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Score(format!(
                    "relevance {p} for sentence {} is outside [0, 1]",
                    s.index
                )));
            }
            Ok((s.index, p))
        })
        .collect::<Result<Vec<_>>>()?;
    RankedList::from_scores(entries)
}

/// Offline stand-in: Jaccard overlap of token sets.
#[derive(Debug, Clone, Copy, Default)]
pub struct JaccardRelevance;

impl JaccardRelevance {
    pub fn similarity(a: &str, b: &str) -> f64 {
        let a: HashSet<String> = tokenize(a).into_iter().collect();
        let b: HashSet<String> = tokenize(b).into_iter().collect();
        let union = a.union(&b).count();
        if union == 0 {
            return 0.0;
        }
        a.intersection(&b).count() as f64 / union as f64
    }
}

impl RelevanceScorer for JaccardRelevance {
    fn score(&self, query: &str, texts: &[String]) -> Result<Vec<f64>> {
        Ok(par::map(texts, |t| Self::similarity(query, t)))
    }
}

#[derive(Serialize)]
struct Pair<'a> {
    query: &'a str,
    text: &'a str,
}

#[derive(Serialize)]
struct RelevanceRequest<'a> {
    pairs: Vec<Pair<'a>>,
}

#[derive(Deserialize)]
struct RelevanceResponse {
    scores: Vec<f64>,
}

/// Client for a pairwise relevance service:
/// `POST {"pairs": [{"query", "text"}, ...]}` → `{"scores": [...]}`.
#[derive(Debug, Clone)]
pub struct HttpRelevanceScorer {
    client: JsonClient,
    batch_size: usize,
}

impl HttpRelevanceScorer {
    pub fn new(endpoint: EndpointConfig, batch_size: usize) -> Self {
        HttpRelevanceScorer {
            client: JsonClient::new(endpoint),
            batch_size: batch_size.max(1),
        }
    }
}

impl RelevanceScorer for HttpRelevanceScorer {
    fn score(&self, query: &str, texts: &[String]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.batch_size) {
            let pairs = chunk.iter().map(|t| Pair { query, text: t }).collect();
            let resp: RelevanceResponse = self.client.post(&RelevanceRequest { pairs })?;
            if resp.scores.len() != chunk.len() {
                return Err(Error::Remote {
                    endpoint: self.client.url().to_string(),
                    message: format!("expected {} scores, got {}", chunk.len(), resp.scores.len()),
                });
            }
            out.extend(resp.scores);
        }
        Ok(out)
    }
}
