use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::EntailmentScorer;
use crate::decompose::InformationUnit;
use crate::error::{Error, Result};
use crate::types::SourceDocument;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionConfig {
    /// Minimum improvement for admitting another sentence.
    pub delta: f64,
    /// Minimum entailment probability for a selection to count.
    pub entail_threshold: f64,
    /// Iteration cap for greedy selection; `None` means the document size.
    pub max_iterations: Option<usize>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            delta: 0.3,
            entail_threshold: 0.5,
            max_iterations: None,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::Invalid(format!("delta must be >= 0, got {}", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.entail_threshold) {
            return Err(Error::Invalid(format!(
                "entail_threshold must lie in [0, 1], got {}",
                self.entail_threshold
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::Invalid("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Supporting sentences chosen for one information unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitAttribution {
    pub unit: InformationUnit,
    /// (source index, score) in admission order.
    pub selected: Vec<(usize, f64)>,
}

/// One iteration of greedy selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    /// Best candidate this iteration (lowest index among ties).
    pub candidate: usize,
    /// Score of the premise made of the current selection plus `candidate`.
    pub score: f64,
    pub admitted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub steps: Vec<TraceStep>,
    /// Score of the last admitted premise, or -1 if nothing was admitted.
    pub final_score: f64,
    /// False when the final score fell below the entailment threshold and
    /// the selection was discarded.
    pub kept: bool,
}

fn check_score(score: f64, unit: &InformationUnit, premise: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&score) {
        Ok(score)
    } else {
        Err(Error::Score(format!(
            "entailment score {score} outside [0, 1] for unit {}.{} (premise {premise:?})",
            unit.parent_sentence_index, unit.unit_index
        )))
    }
}

fn unit_context(unit: &InformationUnit) -> String {
    format!(
        "scoring unit {} of answer sentence {}",
        unit.unit_index, unit.parent_sentence_index
    )
}

/// Premise text: the chosen sentences in document order, space-joined.
fn premise(document: &SourceDocument, chosen: &BTreeSet<usize>) -> String {
    document
        .sentences()
        .iter()
        .filter(|s| chosen.contains(&s.index))
        .map(|s| s.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Greedy optimal selection.
///
/// Starting from an empty premise and a previous score of -1, each
/// iteration scores the current selection extended by every remaining
/// sentence and takes the best candidate. It is admitted only if its score
/// beats the previous one by more than `delta`; otherwise the loop stops.
/// A selection whose final score is below `entail_threshold` is dropped.
pub fn optimal_select(
    unit: &InformationUnit,
    document: &SourceDocument,
    scorer: &dyn EntailmentScorer,
    cfg: &SelectionConfig,
) -> Result<UnitAttribution> {
    optimal_select_traced(unit, document, scorer, cfg).map(|(a, _)| a)
}

pub fn optimal_select_traced(
    unit: &InformationUnit,
    document: &SourceDocument,
    scorer: &dyn EntailmentScorer,
    cfg: &SelectionConfig,
) -> Result<(UnitAttribution, SelectionTrace)> {
    if document.is_empty() {
        return Err(Error::Invalid("cannot select from an empty document".into()));
    }
    let max_iterations = cfg.max_iterations.unwrap_or(document.len());
    let mut selected: Vec<(usize, f64)> = Vec::new();
    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    let mut remaining: Vec<usize> = document.sentences().iter().map(|s| s.index).collect();
    let mut prev_score = -1.0f64;
    let mut steps = Vec::new();

    while !remaining.is_empty() && steps.len() < max_iterations {
        let premises: Vec<String> = remaining
            .iter()
            .map(|&cand| {
                let mut with = chosen.clone();
                with.insert(cand);
                premise(document, &with)
            })
            .collect();
        let pairs: Vec<(String, String)> = premises
            .iter()
            .map(|p| (p.clone(), unit.text.clone()))
            .collect();
        let scores = scorer
            .score_batch(&pairs)
            .map_err(|e| e.context(unit_context(unit)))?;
        if scores.len() != pairs.len() {
            return Err(Error::Score(format!(
                "scorer returned {} scores for {} premises",
                scores.len(),
                pairs.len()
            )));
        }

        // `remaining` is in index order, so the first maximum is the
        // lowest-index one.
        let mut best = 0usize;
        for (pos, (&score, p)) in scores.iter().zip(&premises).enumerate() {
            check_score(score, unit, p)?;
            if score > scores[best] {
                best = pos;
            }
        }
        let curr_score = scores[best];
        let candidate = remaining[best];
        let admitted = curr_score > prev_score + cfg.delta;
        steps.push(TraceStep {
            candidate,
            score: curr_score,
            admitted,
        });
        if !admitted {
            break;
        }
        selected.push((candidate, curr_score));
        chosen.insert(candidate);
        remaining.remove(best);
        prev_score = curr_score;
    }

    let kept = prev_score >= cfg.entail_threshold;
    if !kept {
        selected.clear();
    }
    Ok((
        UnitAttribution {
            unit: unit.clone(),
            selected,
        },
        SelectionTrace {
            steps,
            final_score: prev_score,
            kept,
        },
    ))
}

/// Scores each sentence alone and keeps those at or above the threshold,
/// best first (ties by ascending index).
pub fn ranked_select(
    unit: &InformationUnit,
    document: &SourceDocument,
    scorer: &dyn EntailmentScorer,
    cfg: &SelectionConfig,
) -> Result<UnitAttribution> {
    if document.is_empty() {
        return Err(Error::Invalid("cannot select from an empty document".into()));
    }
    let pairs: Vec<(String, String)> = document
        .sentences()
        .iter()
        .map(|s| (s.text.clone(), unit.text.clone()))
        .collect();
    let scores = scorer
        .score_batch(&pairs)
        .map_err(|e| e.context(unit_context(unit)))?;
    if scores.len() != pairs.len() {
        return Err(Error::Score(format!(
            "scorer returned {} scores for {} premises",
            scores.len(),
            pairs.len()
        )));
    }
    let mut selected = Vec::new();
    for (s, &score) in document.sentences().iter().zip(&scores) {
        if check_score(score, unit, &s.text)? >= cfg.entail_threshold {
            selected.push((s.index, score));
        }
    }
    selected.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(UnitAttribution {
        unit: unit.clone(),
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribute::testing::{subset_doc, SubsetTable};
    use proptest::prelude::*;

    fn unit() -> InformationUnit {
        InformationUnit {
            parent_sentence_index: 0,
            unit_index: 0,
            text: "u".into(),
        }
    }

    /// Independent re-statement of the greedy loop over bitmasks.
    fn simulate(table: &SubsetTable, n: usize, delta: f64, threshold: f64) -> Vec<(usize, f64)> {
        let mut mask = 0u32;
        let mut out = Vec::new();
        let mut prev = -1.0;
        loop {
            let mut best: Option<(usize, f64)> = None;
            for d in 0..n {
                if mask & (1 << d) != 0 {
                    continue;
                }
                let s = table.get(mask | (1 << d));
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((d, s));
                }
            }
            match best {
                Some((d, s)) if s > prev + delta => {
                    out.push((d, s));
                    mask |= 1 << d;
                    prev = s;
                }
                _ => break,
            }
        }
        if prev < threshold {
            out.clear();
        }
        out
    }

    #[test]
    fn constant_zero_scorer_admits_one_then_discards() {
        let doc = subset_doc(3);
        let table = SubsetTable::constant(3, 0.0);
        let (a, trace) = optimal_select_traced(&unit(), &doc, &table, &SelectionConfig::default()).unwrap();
        assert!(a.selected.is_empty());
        assert_eq!(trace.steps.len(), 2);
        assert!(trace.steps[0].admitted && !trace.steps[1].admitted);
        assert_eq!(trace.final_score, 0.0);
        assert!(!trace.kept);
    }

    #[test]
    fn stops_when_gain_is_too_small() {
        let doc = subset_doc(3);
        let mut table = SubsetTable::constant(3, 0.0);
        table.set(&[0], 0.2);
        table.set(&[1], 0.6);
        table.set(&[2], 0.3);
        table.set(&[0, 1], 0.7);
        table.set(&[1, 2], 0.8);
        table.set(&[0, 2], 0.5);
        table.set(&[0, 1, 2], 0.75);
        let cfg = SelectionConfig::default();
        let a = optimal_select(&unit(), &doc, &table, &cfg).unwrap();
        assert_eq!(a.selected, vec![(1, 0.6)]);
        assert_eq!(a.selected, simulate(&table, 3, cfg.delta, cfg.entail_threshold));
    }

    #[test]
    fn composes_two_sentences() {
        let doc = subset_doc(3);
        let mut table = SubsetTable::constant(3, 0.1);
        table.set(&[0], 0.4);
        table.set(&[1], 0.2);
        table.set(&[2], 0.3);
        table.set(&[0, 2], 0.9);
        table.set(&[0, 1], 0.5);
        table.set(&[0, 1, 2], 1.0);
        let (a, trace) = optimal_select_traced(&unit(), &doc, &table, &SelectionConfig::default()).unwrap();
        assert_eq!(a.selected, vec![(0, 0.4), (2, 0.9)]);
        assert_eq!(trace.steps.len(), 3);
        assert!(!trace.steps[2].admitted);
    }

    #[test]
    fn argmax_ties_take_the_lowest_index() {
        let doc = subset_doc(4);
        let mut table = SubsetTable::constant(4, 0.0);
        for i in [1, 2, 3] {
            table.set(&[i], 0.7);
        }
        let a = optimal_select(&unit(), &doc, &table, &SelectionConfig::default()).unwrap();
        assert_eq!(a.selected, vec![(1, 0.7)]);
    }

    #[test]
    fn premise_uses_document_order() {
        // Only the premise "s1 s3" (document order) scores high.
        let doc = subset_doc(4);
        let mut table = SubsetTable::constant(4, 0.0);
        table.set(&[3], 0.4);
        table.set(&[1, 3], 0.95);
        let a = optimal_select(&unit(), &doc, &table, &SelectionConfig::default()).unwrap();
        assert_eq!(a.selected, vec![(3, 0.4), (1, 0.95)]);
        assert!(table.seen().contains("s1 s3"));
        assert!(!table.seen().contains("s3 s1"));
    }

    #[test]
    fn iteration_cap_is_respected() {
        let doc = subset_doc(3);
        let mut table = SubsetTable::constant(3, 0.0);
        table.set(&[0], 0.2);
        table.set(&[0, 1], 0.6);
        table.set(&[0, 1, 2], 1.0);
        let cfg = SelectionConfig { max_iterations: Some(1), ..Default::default() };
        let (a, trace) = optimal_select_traced(&unit(), &doc, &table, &cfg).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert!(a.selected.is_empty(), "0.2 is below the threshold");
    }

    #[test]
    fn out_of_range_scores_are_errors() {
        let doc = subset_doc(2);
        let table = SubsetTable::constant(2, 1.5);
        assert!(optimal_select(&unit(), &doc, &table, &SelectionConfig::default()).is_err());
        assert!(ranked_select(&unit(), &doc, &table, &SelectionConfig::default()).is_err());
    }

    #[test]
    fn ranked_examples() {
        let doc = subset_doc(3);
        let cfg = SelectionConfig::default();

        let low = SubsetTable::constant(3, 0.49);
        assert!(ranked_select(&unit(), &doc, &low, &cfg).unwrap().selected.is_empty());

        let mut t = SubsetTable::constant(3, 0.0);
        t.set(&[0], 0.7);
        t.set(&[1], 0.9);
        t.set(&[2], 0.5);
        assert_eq!(
            ranked_select(&unit(), &doc, &t, &cfg).unwrap().selected,
            vec![(1, 0.9), (0, 0.7), (2, 0.5)]
        );

        let doc2 = subset_doc(2);
        let tie = SubsetTable::constant(2, 0.6);
        assert_eq!(
            ranked_select(&unit(), &doc2, &tie, &cfg).unwrap().selected,
            vec![(0, 0.6), (1, 0.6)]
        );
    }

    #[test]
    fn config_validation() {
        assert!(SelectionConfig { delta: -0.1, ..Default::default() }.validate().is_err());
        assert!(SelectionConfig { entail_threshold: 1.1, ..Default::default() }.validate().is_err());
        assert!(SelectionConfig { max_iterations: Some(0), ..Default::default() }.validate().is_err());
        assert!(SelectionConfig::default().validate().is_ok());
    }

    proptest! {
        #[test]
        fn matches_simulator_and_respects_gaps(
            n in 1usize..6,
            raw in proptest::collection::vec(0u8..=20, 64),
            delta_steps in 0u8..10,
        ) {
            let delta = f64::from(delta_steps) * 0.05;
            let table = SubsetTable::from_fn(n, |mask| f64::from(raw[mask as usize % 64]) / 20.0);
            let cfg = SelectionConfig { delta, entail_threshold: 0.5, max_iterations: None };
            let a = optimal_select(&unit(), &subset_doc(n), &table, &cfg).unwrap();
            prop_assert_eq!(&a.selected, &simulate(&table, n, delta, 0.5));
            for w in a.selected.windows(2) {
                prop_assert!(w[1].1 > w[0].1 + delta);
            }
        }

        #[test]
        fn large_delta_matches_ranked_top1(
            n in 1usize..6,
            raw in proptest::collection::vec(0u8..=20, 64),
        ) {
            let table = SubsetTable::from_fn(n, |mask| f64::from(raw[mask as usize % 64]) / 20.0);
            let cfg = SelectionConfig { delta: 1.0, entail_threshold: 0.5, max_iterations: None };
            let doc = subset_doc(n);
            let opt = optimal_select(&unit(), &doc, &table, &cfg).unwrap();
            let ranked = ranked_select(&unit(), &doc, &table, &cfg).unwrap();
            prop_assert!(opt.selected.len() <= 1);
            // With delta = 1 the first admission needs a score above 0.
            if let Some(&top) = ranked.selected.first() {
                if top.1 > 0.0 {
                    prop_assert_eq!(opt.selected, vec![top]);
                }
            }
        }
    }
}
