//! Constructed corpora with known answers, for smoke tests and benchmarks.
//!
//! Every token is unique to one (record, sentence) slot, so the lexical
//! entailment proxy scores a premise by exactly the share of the unit's
//! tokens it contains.

use super::{CanonicalRecord, Split};
use crate::types::{AnswerRecord, AnswerSentence, SourceDocument};

fn word(record: usize, sentence: usize, slot: usize) -> String {
    format!("r{record}s{sentence}w{slot}")
}

fn sentence(words: &[String]) -> String {
    let mut s = words.join(" ");
    s.push('.');
    s
}

fn source_words(record: usize, sentence: usize, len: usize) -> Vec<String> {
    (0..len).map(|w| word(record, sentence, w)).collect()
}

fn build(record: usize, sources: Vec<String>, answers: Vec<(String, Vec<usize>)>) -> CanonicalRecord {
    let qid = format!("q{record}");
    let doc = SourceDocument::from_texts(&qid, &sources).expect("distinct non-empty sources");
    let sentences = answers
        .into_iter()
        .enumerate()
        .map(|(i, (text, gold))| AnswerSentence::new(i, text, gold).expect("non-empty answer"))
        .collect();
    let answer = AnswerRecord::new(&qid, format!("Question {record}?"), format!("a{record}"), sentences)
        .expect("contiguous answer");
    CanonicalRecord::new(Split::Test, doc, answer).expect("valid synthetic record")
}

/// Each answer sentence restates one source sentence with its words in
/// reverse order: the same tokens, but not a verbatim copy, so it survives
/// the extractive filter. Sources share no vocabulary.
///
/// Record `r` has `doc_len` sources and `answer_len` answer sentences;
/// answer sentence `j` restates source `(j * 2 + r) % doc_len`, moving to
/// the next unused source on collision.
pub fn restated_corpus(records: usize, doc_len: usize, answer_len: usize) -> Vec<CanonicalRecord> {
    assert!(answer_len <= doc_len, "answers restate distinct sources");
    (0..records)
        .map(|r| {
            let words: Vec<Vec<String>> = (0..doc_len).map(|s| source_words(r, s, 6)).collect();
            let sources = words.iter().map(|w| sentence(w)).collect();
            let mut used = Vec::new();
            let answers = (0..answer_len)
                .map(|j| {
                    let mut target = (j * 2 + r) % doc_len;
                    while used.contains(&target) {
                        target = (target + 1) % doc_len;
                    }
                    used.push(target);
                    let mut w = words[target].clone();
                    w.reverse();
                    (sentence(&w), vec![target])
                })
                .collect();
            build(r, sources, answers)
        })
        .collect()
}

/// Each answer sentence is a five-token fact split across two sources: two
/// tokens in each, the fifth in neither. Either source alone entails 0.4 of
/// the fact and the pair 0.8, so only multi-sentence selection can recover
/// the gold pair under a 0.5 threshold.
pub fn composition_corpus(records: usize, doc_len: usize) -> Vec<CanonicalRecord> {
    assert!(doc_len >= 4, "needs room for two supports and distractors");
    (0..records)
        .map(|r| {
            let (a, b) = (r % doc_len, (r + doc_len / 2) % doc_len);
            let fact: Vec<String> = (0..5).map(|w| format!("r{r}f{w}")).collect();
            let sources = (0..doc_len)
                .map(|s| {
                    let mut w = source_words(r, s, 4);
                    if s == a {
                        w.extend_from_slice(&fact[0..2]);
                    } else if s == b {
                        w.extend_from_slice(&fact[2..4]);
                    }
                    sentence(&w)
                })
                .collect();
            let mut gold = vec![a, b];
            gold.sort_unstable();
            build(r, sources, vec![(sentence(&fact), gold)])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribute::lexical_entailment_proxy;
    use crate::text::is_extractive;

    #[test]
    fn restated_sentences_are_not_extractive_but_fully_entailed() {
        for rec in restated_corpus(5, 6, 3) {
            for s in rec.answer().sentences() {
                assert!(!is_extractive(&s.text, rec.document()));
                let gold = *s.gold_attributions.iter().next().unwrap();
                for src in rec.document().sentences() {
                    let p = lexical_entailment_proxy(&src.text, &s.text);
                    assert_eq!(p, if src.index == gold { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn restated_targets_are_distinct() {
        for rec in restated_corpus(7, 5, 5) {
            let mut g: Vec<usize> = rec.answer().sentences().iter().flat_map(|s| s.gold_attributions.clone()).collect();
            g.sort_unstable();
            g.dedup();
            assert_eq!(g.len(), 5);
        }
    }

    #[test]
    fn composition_supports_score_as_designed() {
        for rec in composition_corpus(4, 6) {
            let s = &rec.answer().sentences()[0];
            let gold: Vec<usize> = s.gold_attributions.iter().copied().collect();
            let text = |i: usize| rec.document().get(i).unwrap().text.clone();
            assert!((lexical_entailment_proxy(&text(gold[0]), &s.text) - 0.4).abs() < 1e-12);
            assert!((lexical_entailment_proxy(&text(gold[1]), &s.text) - 0.4).abs() < 1e-12);
            let both = format!("{} {}", text(gold[0]), text(gold[1]));
            assert!((lexical_entailment_proxy(&both, &s.text) - 0.8).abs() < 1e-12);
        }
    }
}
