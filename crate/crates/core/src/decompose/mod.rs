//! Answer decomposition into information units.

mod cache;
mod llm;

use serde::{Deserialize, Serialize};

pub use cache::{cache_key, DecompositionCache, DecompositionCacheEntry};
pub use llm::{
    parse_response, Completion, HttpCompletion, LlmDecomposer, LlmStats, PROMPT_PREFIX,
    TEMPLATE_VERSION,
};

use crate::error::{Error, Result};
use crate::types::AnswerSentence;

/// An atomic fact taken from one answer sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformationUnit {
    pub parent_sentence_index: usize,
    pub unit_index: usize,
    pub text: String,
}

/// Splits a sentence into one or more fact strings.
pub trait Decomposer: Send + Sync {
    /// Stable identifier, part of the cache key.
    fn id(&self) -> &str;

    fn split(&self, sentence: &str) -> Result<Vec<String>>;
}

/// Treats the whole sentence as its only information unit.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityDecomposer;

impl Decomposer for IdentityDecomposer {
    fn id(&self) -> &str {
        "identity"
    }

    fn split(&self, sentence: &str) -> Result<Vec<String>> {
        Ok(vec![sentence.to_string()])
    }
}

/// Decomposes `sentence`, falling back to the sentence itself when the
/// backend yields nothing usable. Errors carry the sentence index.
pub fn decompose(sentence: &AnswerSentence, backend: &dyn Decomposer) -> Result<Vec<InformationUnit>> {
    let mut parts: Vec<String> = backend
        .split(&sentence.text)
        .map_err(|e| e.context(format!("decomposing answer sentence {}", sentence.index)))?
        .into_iter()
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() {
        parts.push(sentence.text.clone());
    }
    Ok(parts
        .into_iter()
        .enumerate()
        .map(|(i, text)| InformationUnit {
            parent_sentence_index: sentence.index,
            unit_index: i,
            text,
        })
        .collect())
}

impl InformationUnit {
    pub fn whole(sentence: &AnswerSentence) -> Self {
        InformationUnit {
            parent_sentence_index: sentence.index,
            unit_index: 0,
            text: sentence.text.clone(),
        }
    }
}

pub(crate) fn ensure_nonempty(units: &[String], key: &str) -> Result<()> {
    if units.is_empty() {
        return Err(Error::Invalid(format!("cache entry {key} has no units")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(Vec<&'static str>);

    impl Decomposer for Fixed {
        fn id(&self) -> &str {
            "fixed"
        }

        fn split(&self, _: &str) -> Result<Vec<String>> {
            Ok(self.0.iter().map(|s| s.to_string()).collect())
        }
    }

    #[test]
    fn identity_returns_the_sentence() {
        let text = "The Islamic Golden Age is traditionally dated from the 8th century to the 14th century.";
        let s = AnswerSentence::new(3, text, []).unwrap();
        let units = decompose(&s, &IdentityDecomposer).unwrap();
        assert_eq!(
            units,
            vec![InformationUnit {
                parent_sentence_index: 3,
                unit_index: 0,
                text: text.into()
            }]
        );
    }

    #[test]
    fn unit_indices_are_gapless_after_dropping_blanks() {
        let s = AnswerSentence::new(1, "x", []).unwrap();
        let units = decompose(&s, &Fixed(vec!["a", "  ", "b", "", "c"])).unwrap();
        let idx: Vec<usize> = units.iter().map(|u| u.unit_index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
        assert!(units.iter().all(|u| u.parent_sentence_index == 1));
    }

    #[test]
    fn empty_backend_output_falls_back_to_identity() {
        let s = AnswerSentence::new(0, "Whole sentence.", []).unwrap();
        let units = decompose(&s, &Fixed(vec![" "])).unwrap();
        assert_eq!(units.len(), 1);
        assert_eq!(units[0].text, "Whole sentence.");
    }
}
