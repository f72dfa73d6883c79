use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{tokenize, RankedList};
use crate::error::{Error, Result};
use crate::par;
use crate::types::SourceDocument;

/// Okapi BM25 parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && self.k1.is_finite()) {
            return Err(Error::Invalid(format!("bm25 k1 must be positive, got {}", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::Invalid(format!("bm25 b must lie in [0, 1], got {}", self.b)));
        }
        Ok(())
    }
}

/// Scores every sentence of `document` as its own retrieval unit.
///
/// `score(s) = sum over unique query terms t of
/// idf(t) * tf(t,s)(k1+1) / (tf(t,s) + k1(1 - b + b|s|/avgdl))` with
/// `idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))`.
pub fn bm25_rank(query: &str, document: &SourceDocument, params: &Bm25Params) -> Result<RankedList> {
    params.validate()?;
    let sentences: Vec<Vec<String>> = document
        .sentences()
        .iter()
        .map(|s| tokenize(&s.text))
        .collect();
    let total: usize = sentences.iter().map(Vec::len).sum();
    if total == 0 {
        return Err(Error::Invalid(format!(
            "document for question {} has no tokens to rank",
            document.question_id()
        )));
    }
    let n = sentences.len() as f64;
    let avgdl = total as f64 / n;

    let mut query_terms: Vec<String> = tokenize(query);
    let mut seen = HashSet::new();
    query_terms.retain(|t| seen.insert(t.clone()));

    let idf: Vec<f64> = query_terms
        .iter()
        .map(|t| {
            let df = sentences.iter().filter(|s| s.contains(t)).count() as f64;
            (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
        })
        .collect();

    let scores = par::map(&sentences, |tokens| {
        let mut tf: HashMap<&str, usize> = HashMap::new();
        for t in tokens {
            *tf.entry(t.as_str()).or_default() += 1;
        }
        let norm = params.k1 * (1.0 - params.b + params.b * tokens.len() as f64 / avgdl);
        query_terms
            .iter()
            .zip(&idf)
            .map(|(t, idf)| match tf.get(t.as_str()) {
                Some(&f) => {
                    let f = f as f64;
                    idf * f * (params.k1 + 1.0) / (f + norm)
                }
                None => 0.0,
            })
            .sum::<f64>()
    });

    RankedList::from_scores(
        document
            .sentences()
            .iter()
            .zip(scores)
            .map(|(s, score)| (s.index, score))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn no_shared_tokens_scores_zero_in_index_order() {
        let doc = SourceDocument::from_texts("q", &["alpha beta", "gamma", "delta epsilon"]).unwrap();
        let r = bm25_rank("omega", &doc, &Bm25Params::default()).unwrap();
        assert_eq!(r.entries(), &[(0, 0.0), (1, 0.0), (2, 0.0)]);
    }

    #[test]
    fn single_sentence_closed_form() {
        // N = 1, df = 1 for each term, |s| = avgdl = 3, tf = 1:
        // each term contributes ln(4/3) * 2.2 / (1 + 1.2).
        let doc = SourceDocument::from_texts("q", &["game arrives soon"]).unwrap();
        let r = bm25_rank("game arrives soon", &doc, &Bm25Params::default()).unwrap();
        let expected = 3.0 * (4.0f64 / 3.0).ln() * 2.2 / 2.2;
        assert_eq!(r.entries()[0].0, 0);
        assert!((r.entries()[0].1 - expected).abs() < 1e-12);
    }

    #[test]
    fn three_sentence_hand_computation() {
        // s0 "red apple"          len 2
        // s1 "green apple apple"  len 3
        // s2 "blue sky"           len 2
        // N = 3, avgdl = 7/3. Query "apple": df = 2, idf = ln(1 + 1.5/2.5) = ln 1.6.
        let doc = SourceDocument::from_texts("q", &["red apple", "green apple apple", "blue sky"]).unwrap();
        let r = bm25_rank("apple", &doc, &Bm25Params::default()).unwrap();
        let idf = 1.6f64.ln();
        let avgdl = 7.0 / 3.0;
        let s0 = idf * 1.0 * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * 2.0 / avgdl));
        let s1 = idf * 2.0 * 2.2 / (2.0 + 1.2 * (0.25 + 0.75 * 3.0 / avgdl));
        assert_eq!(r.indices().collect::<Vec<_>>(), vec![1, 0, 2]);
        assert_abs_diff_eq!(r.entries()[0].1, s1, epsilon = 1e-12);
        assert_abs_diff_eq!(r.entries()[1].1, s0, epsilon = 1e-12);
        assert_eq!(r.entries()[2].1, 0.0);
    }

    #[test]
    fn b_zero_ignores_length() {
        let doc = SourceDocument::from_texts("q", &["apple", "apple pie with cream and sugar"]).unwrap();
        let r = bm25_rank("apple", &doc, &Bm25Params { k1: 1.2, b: 0.0 }).unwrap();
        assert_eq!(r.entries()[0].1, r.entries()[1].1);
        assert_eq!(r.indices().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn rejects_tokenless_documents_and_bad_params() {
        let doc = SourceDocument::from_texts("q", &["!!!", "..."]).unwrap();
        assert!(bm25_rank("x", &doc, &Bm25Params::default()).is_err());
        let doc = SourceDocument::from_texts("q", &["x"]).unwrap();
        assert!(bm25_rank("x", &doc, &Bm25Params { k1: 0.0, b: 0.5 }).is_err());
        assert!(bm25_rank("x", &doc, &Bm25Params { k1: 1.0, b: 1.5 }).is_err());
    }

    proptest! {
        #[test]
        fn query_order_and_repeats_do_not_matter(
            words in proptest::collection::vec("[a-e]{1,2}", 1..6),
            repeat in 1usize..3,
        ) {
            let doc = SourceDocument::from_texts(
                "q",
                &["a b c", "d e a", "ab cd de", "e e e b", "c"],
            ).unwrap();
            let query = words.join(" ");
            let mut shuffled: Vec<String> = words.iter().rev().cloned().collect();
            for _ in 1..repeat {
                shuffled.extend(words.iter().cloned());
            }
            let p = Bm25Params::default();
            let a = bm25_rank(&query, &doc, &p).unwrap();
            let b = bm25_rank(&shuffled.join(" "), &doc, &p).unwrap();
            prop_assert_eq!(a.len(), doc.len());
            for (x, y) in a.entries().iter().zip(b.entries()) {
                prop_assert_eq!(x.0, y.0);
                prop_assert!((x.1 - y.1).abs() < 1e-12);
            }
        }
    }
}
