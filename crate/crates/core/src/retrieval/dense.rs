use serde::{Deserialize, Serialize};

use super::{tokenize, RankedList};
use crate::error::{Error, Result};
use crate::http::{EndpointConfig, JsonClient};
use crate::types::SourceDocument;

/// Maps texts to fixed-dimension vectors, preserving input order.
pub trait EmbeddingScorer: Send + Sync {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>>;
}

/// Cosine similarity; zero vectors have similarity 0.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Score(format!(
            "embedding dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (na * nb))
}

pub fn dense_rank(
    query: &str,
    document: &SourceDocument,
    embedder: &dyn EmbeddingScorer,
) -> Result<RankedList> {
    let mut texts = Vec::with_capacity(document.len() + 1);
    texts.push(query.to_string());
    texts.extend(document.sentences().iter().map(|s| s.text.clone()));
    let vectors = embedder.embed(&texts)?;
    if vectors.len() != texts.len() {
        return Err(Error::Score(format!(
            "embedder returned {} vectors for {} texts",
            vectors.len(),
            texts.len()
        )));
    }
    let (q, rest) = vectors.split_first().expect("query vector present");
    let entries = document
        .sentences()
        .iter()
        .zip(rest)
        .map(|(s, v)| Ok((s.index, cosine(q, v)?)))
        .collect::<Result<Vec<_>>>()?;
    RankedList::from_scores(entries)
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    embeddings: Vec<Vec<f64>>,
}

/// Client for an embedding service:
/// `POST {"texts": [...]}` → `{"embeddings": [[...], ...]}`.
#[derive(Debug, Clone)]
pub struct HttpEmbedder {
    client: JsonClient,
    batch_size: usize,
}

impl HttpEmbedder {
    pub fn new(endpoint: EndpointConfig, batch_size: usize) -> Self {
        HttpEmbedder {
            client: JsonClient::new(endpoint),
            batch_size: batch_size.max(1),
        }
    }
}

impl EmbeddingScorer for HttpEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.batch_size) {
            let resp: EmbedResponse = self.client.post(&EmbedRequest { texts: chunk })?;
            if resp.embeddings.len() != chunk.len() {
                return Err(Error::Remote {
                    endpoint: self.client.url().to_string(),
                    message: format!(
                        "expected {} embeddings, got {}",
                        chunk.len(),
                        resp.embeddings.len()
                    ),
                });
            }
            out.extend(resp.embeddings);
        }
        if let Some(first) = out.first() {
            let dim = first.len();
            if out.iter().any(|v| v.len() != dim) {
                return Err(Error::Remote {
                    endpoint: self.client.url().to_string(),
                    message: "embeddings have inconsistent dimensions".into(),
                });
            }
        }
        Ok(out)
    }
}

/// Offline stand-in: token counts hashed into a fixed number of buckets.
#[derive(Debug, Clone, Copy)]
pub struct HashingEmbedder {
    pub dimensions: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        HashingEmbedder { dimensions: 256 }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl EmbeddingScorer for HashingEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        let dims = self.dimensions.max(1);
        Ok(texts
            .iter()
            .map(|t| {
                let mut v = vec![0.0; dims];
                for tok in tokenize(t) {
                    v[(fnv1a(tok.as_bytes()) % dims as u64) as usize] += 1.0;
                }
                v
            })
            .collect())
    }
}
