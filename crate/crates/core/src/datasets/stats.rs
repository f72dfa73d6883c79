use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::CanonicalRecord;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetStats {
    pub size: usize,
    pub avg_source_sentences: f64,
    /// Mean gold-set size over answer sentences that have at least one gold
    /// attribution.
    pub avg_attributions_per_sentence: f64,
    /// Same numerator, averaged over all answer sentences.
    pub avg_attributions_per_any_sentence: f64,
    pub avg_sentences_per_answer: f64,
    pub avg_answers_per_question: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_stats(records: &[CanonicalRecord]) -> DatasetStats {
    let size = records.len();
    let sources: usize = records.iter().map(|r| r.document().len()).sum();
    let sentences: Vec<usize> = records
        .iter()
        .flat_map(|r| r.answer().sentences().iter().map(|s| s.gold_attributions.len()))
        .collect();
    let gold_total: usize = sentences.iter().sum();
    let attributed = sentences.iter().filter(|&&g| g > 0).count();
    let questions: HashSet<&str> = records.iter().map(|r| r.question_id()).collect();

    DatasetStats {
        size,
        avg_source_sentences: ratio(sources, size),
        avg_attributions_per_sentence: ratio(gold_total, attributed),
        avg_attributions_per_any_sentence: ratio(gold_total, sentences.len()),
        avg_sentences_per_answer: ratio(sentences.len(), size),
        avg_answers_per_question: ratio(size, questions.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::Split;
    use crate::types::{AnswerRecord, AnswerSentence, SourceDocument};
    use proptest::prelude::*;

    fn record(qid: &str, aid: &str, n_sources: usize, golds: &[&[usize]]) -> CanonicalRecord {
        let texts: Vec<String> = (0..n_sources).map(|i| format!("Sentence {i}.")).collect();
        let doc = SourceDocument::from_texts(qid, &texts).unwrap();
        let sentences = golds
            .iter()
            .enumerate()
            .map(|(i, g)| AnswerSentence::new(i, format!("Answer {i}."), g.iter().copied()).unwrap())
            .collect();
        let ans = AnswerRecord::new(qid, "Q?", aid, sentences).unwrap();
        CanonicalRecord::new(Split::Train, doc, ans).unwrap()
    }

    #[test]
    fn empty_input_is_all_zero() {
        assert_eq!(compute_stats(&[]), DatasetStats::default());
    }

    #[test]
    fn single_record_hand_arithmetic() {
        let s = compute_stats(&[record("q", "a", 4, &[&[0, 1], &[3]])]);
        assert_eq!(s.size, 1);
        assert_eq!(s.avg_source_sentences, 4.0);
        assert_eq!(s.avg_attributions_per_sentence, 1.5);
        assert_eq!(s.avg_sentences_per_answer, 2.0);
        assert_eq!(s.avg_answers_per_question, 1.0);
    }

    #[test]
    fn shared_question_counts_answers() {
        let s = compute_stats(&[record("q", "a", 2, &[&[]]), record("q", "b", 2, &[&[1]])]);
        assert_eq!(s.avg_answers_per_question, 2.0);
        // One of two sentences is attributed.
        assert_eq!(s.avg_attributions_per_sentence, 1.0);
        assert_eq!(s.avg_attributions_per_any_sentence, 0.5);
    }

    prop_compose! {
        fn arb_records(prefix: &'static str)
            (specs in proptest::collection::vec(
                (1usize..6, proptest::collection::vec(proptest::collection::btree_set(0usize..6, 0..3), 1..4), 0usize..3),
                0..6))
            -> Vec<CanonicalRecord>
        {
            specs
                .into_iter()
                .enumerate()
                .map(|(i, (n, golds, q))| {
                    let golds: Vec<Vec<usize>> = golds
                        .into_iter()
                        .map(|g| g.into_iter().filter(|x| *x < n).collect())
                        .collect();
                    let refs: Vec<&[usize]> = golds.iter().map(Vec::as_slice).collect();
                    record(&format!("{prefix}{q}"), &format!("{prefix}a{i}"), n, &refs)
                })
                .collect()
        }
    }

    proptest! {
        #[test]
        fn union_is_weighted_mean_of_parts(a in arb_records("x"), b in arb_records("y")) {
            let (sa, sb) = (compute_stats(&a), compute_stats(&b));
            let all: Vec<CanonicalRecord> = a.iter().chain(b.iter()).cloned().collect();
            let s = compute_stats(&all);
            prop_assert_eq!(s.size, sa.size + sb.size);
            if s.size > 0 {
                let w = |x: f64, y: f64, wa: f64, wb: f64| (x * wa + y * wb) / (wa + wb);
                let (na, nb) = (sa.size as f64, sb.size as f64);
                prop_assert!((s.avg_source_sentences - w(sa.avg_source_sentences, sb.avg_source_sentences, na, nb)).abs() < 1e-9);
                prop_assert!((s.avg_sentences_per_answer - w(sa.avg_sentences_per_answer, sb.avg_sentences_per_answer, na, nb)).abs() < 1e-9);
                let attributed = |r: &[CanonicalRecord]| r.iter()
                    .flat_map(|x| x.answer().sentences().iter())
                    .filter(|s| !s.gold_attributions.is_empty())
                    .count() as f64;
                let (ga, gb) = (attributed(&a), attributed(&b));
                if ga + gb > 0.0 {
                    prop_assert!((s.avg_attributions_per_sentence
                        - w(sa.avg_attributions_per_sentence, sb.avg_attributions_per_sentence, ga, gb)).abs() < 1e-9);
                }
                let questions = |r: &[CanonicalRecord]| r.iter().map(|x| x.question_id().to_string())
                    .collect::<HashSet<_>>().len() as f64;
                let (qa, qb) = (questions(&a), questions(&b));
                prop_assert!((s.avg_answers_per_question
                    - w(sa.avg_answers_per_question, sb.avg_answers_per_question, qa, qb)).abs() < 1e-9);
            }
        }
    }
}
