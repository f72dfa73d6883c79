//! P/R/F1@k evaluation of predicted attributions against gold.
//!
//! Precision at k divides by the number of predictions actually made within
//! the cutoff (`min(k, |pred|)`), not by k, so a system that abstains beyond
//! its first prediction scores the same at every k.

mod predictions;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use predictions::{join_predictions, read_predictions, write_predictions, PredictionRecord, ScoredIndex, SentencePrediction};
pub use report::{emit_report, ReportFormat};

use crate::attribute::AttributionList;
use crate::datasets::CanonicalRecord;
use crate::error::{Error, Result};
use crate::par;
use crate::text::normalized_sentences;

pub const DEFAULT_KS: [usize; 3] = [1, 2, 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentenceEval {
    pub k: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub evaluated: bool,
}

pub fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Hits within the first `k` predictions and how many predictions that is.
fn hits_at(pred: &AttributionList, gold: &BTreeSet<usize>, k: usize) -> (usize, usize) {
    let cut = k.min(pred.attributions.len());
    let hits = pred.attributions[..cut]
        .iter()
        .filter(|(i, _)| gold.contains(i))
        .count();
    (hits, cut)
}

pub fn score_sentence(pred: &AttributionList, gold: &BTreeSet<usize>, k: usize) -> SentenceEval {
    let (hits, cut) = hits_at(pred, gold, k);
    let precision = if cut == 0 { 0.0 } else { hits as f64 / cut as f64 };
    let recall = if gold.is_empty() { 0.0 } else { hits as f64 / gold.len() as f64 };
    SentenceEval {
        k,
        precision,
        recall,
        f1: f1(precision, recall),
        evaluated: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub total_sentences: usize,
    pub filtered_extractive: usize,
    pub filtered_empty_gold: usize,
    pub evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub k: BTreeMap<usize, Prf>,
    pub counts: Counts,
}

impl MetricsReport {
    /// Nothing was left to evaluate; all metrics are reported as zero.
    pub fn is_vacuous(&self) -> bool {
        self.counts.evaluated == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Mean of per-sentence scores.
    #[default]
    Macro,
    /// Pooled hit counts across sentences.
    Micro,
}

/// Scores every evaluable answer sentence. Sentences copied verbatim from
/// the document and sentences without gold attributions are counted but
/// skipped.
pub fn evaluate(
    items: &[(&CanonicalRecord, &[AttributionList])],
    ks: &[usize],
    averaging: Averaging,
) -> Result<MetricsReport> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::Invalid("cutoffs must be positive and non-empty".into()));
    }
    let mut counts = Counts::default();
    let mut evaluable: Vec<(&AttributionList, &BTreeSet<usize>)> = Vec::new();
    for (record, preds) in items {
        let sentences = record.answer().sentences();
        let aligned = preds.len() == sentences.len()
            && preds
                .iter()
                .zip(sentences)
                .all(|(p, s)| p.answer_sentence_index == s.index);
        if !aligned {
            return Err(Error::Invalid(format!(
                "predictions for question {} answer {} do not align with its {} answer sentences",
                record.question_id(),
                record.answer_id(),
                sentences.len()
            )));
        }
        let doc_norm = normalized_sentences(record.document());
        for (p, s) in preds.iter().zip(sentences) {
            counts.total_sentences += 1;
            if doc_norm.contains(&crate::text::normalize(&s.text)) {
                counts.filtered_extractive += 1;
            } else if s.gold_attributions.is_empty() {
                counts.filtered_empty_gold += 1;
            } else {
                evaluable.push((p, &s.gold_attributions));
            }
        }
    }
    counts.evaluated = evaluable.len();
    if counts.evaluated == 0 {
        log::warn!("no answer sentences left to evaluate; reporting zeros");
    }

    let k = ks
        .iter()
        .map(|&k| {
            let prf = match averaging {
                Averaging::Macro => macro_average(&evaluable, k),
                Averaging::Micro => micro_average(&evaluable, k),
            };
            (k, prf)
        })
        .collect();
    Ok(MetricsReport { k, counts })
}

fn macro_average(items: &[(&AttributionList, &BTreeSet<usize>)], k: usize) -> Prf {
    if items.is_empty() {
        return Prf::default();
    }
    let evals = par::map(items, |(p, g)| score_sentence(p, g, k));
    let n = evals.len() as f64;
    Prf {
        p: evals.iter().map(|e| e.precision).sum::<f64>() / n,
        r: evals.iter().map(|e| e.recall).sum::<f64>() / n,
        f1: evals.iter().map(|e| e.f1).sum::<f64>() / n,
    }
}

fn micro_average(items: &[(&AttributionList, &BTreeSet<usize>)], k: usize) -> Prf {
    let (mut hits, mut predicted, mut gold) = (0usize, 0usize, 0usize);
    for (p, g) in items {
        let (h, c) = hits_at(p, g, k);
        hits += h;
        predicted += c;
        gold += g.len();
    }
    let p = if predicted == 0 { 0.0 } else { hits as f64 / predicted as f64 };
    let r = if gold == 0 { 0.0 } else { hits as f64 / gold as f64 };
    Prf { p, r, f1: f1(p, r) }
}
