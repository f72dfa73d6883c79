//! Entailment-based attribution of answer sentences to source sentences.

mod pipeline;
mod scorer;
mod select;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use pipeline::{
    attribute_answer, retrieval_attribute, Pipeline, PruneSpec, RecordAttribution, SelectionMode,
};
pub use scorer::{
    lexical_entailment_proxy, CountingScorer, EntailmentScorer, HttpEntailmentScorer,
    LexicalEntailmentProxy,
};
pub use select::{
    optimal_select, optimal_select_traced, ranked_select, SelectionConfig, SelectionTrace,
    TraceStep, UnitAttribution,
};

use crate::error::{Error, Result};

/// Ranked attributions for one answer sentence: unique source indices,
/// scores non-increasing, ties by ascending index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionList {
    pub answer_sentence_index: usize,
    pub attributions: Vec<(usize, f64)>,
}

impl AttributionList {
    pub fn empty(answer_sentence_index: usize) -> Self {
        AttributionList {
            answer_sentence_index,
            attributions: Vec::new(),
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.attributions.iter().map(|a| a.0)
    }
}

/// Pools the selections of every unit of one sentence, keeping the best
/// score per source sentence, then sorts best-first.
pub fn merge_unit_attributions(units: &[UnitAttribution], sentence_index: usize) -> Result<AttributionList> {
    let mut best: HashMap<usize, f64> = HashMap::new();
    for u in units {
        if u.unit.parent_sentence_index != sentence_index {
            return Err(Error::Invalid(format!(
                "unit from sentence {} merged into sentence {sentence_index}",
                u.unit.parent_sentence_index
            )));
        }
        for &(idx, score) in &u.selected {
            best.entry(idx)
                .and_modify(|s| *s = s.max(score))
                .or_insert(score);
        }
    }
    let mut attributions: Vec<(usize, f64)> = best.into_iter().collect();
    attributions.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(AttributionList {
        answer_sentence_index: sentence_index,
        attributions,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::InformationUnit;
    use proptest::prelude::*;

    fn ua(sentence: usize, unit: usize, selected: &[(usize, f64)]) -> UnitAttribution {
        UnitAttribution {
            unit: InformationUnit {
                parent_sentence_index: sentence,
                unit_index: unit,
                text: format!("u{unit}"),
            },
            selected: selected.to_vec(),
        }
    }

    #[test]
    fn merge_keeps_max_and_sorts() {
        let units = [ua(0, 0, &[(3, 0.8)]), ua(0, 1, &[(3, 0.6), (1, 0.9)])];
        let merged = merge_unit_attributions(&units, 0).unwrap();
        assert_eq!(merged.attributions, vec![(1, 0.9), (3, 0.8)]);
    }

    #[test]
    fn merge_single_and_empty() {
        let single = [ua(2, 0, &[(4, 0.9), (0, 0.7), (2, 0.7)])];
        assert_eq!(
            merge_unit_attributions(&single, 2).unwrap().attributions,
            vec![(4, 0.9), (0, 0.7), (2, 0.7)]
        );
        let empty = [ua(1, 0, &[]), ua(1, 1, &[])];
        assert!(merge_unit_attributions(&empty, 1).unwrap().attributions.is_empty());
        assert!(merge_unit_attributions(&[ua(0, 0, &[])], 1).is_err());
    }

    fn arb_units() -> impl Strategy<Value = Vec<UnitAttribution>> {
        proptest::collection::vec(
            proptest::collection::btree_map(0usize..8, 0u8..=10, 0..5),
            0..5,
        )
        .prop_map(|units| {
            units
                .into_iter()
                .enumerate()
                .map(|(i, m)| {
                    let sel: Vec<(usize, f64)> =
                        m.into_iter().map(|(k, v)| (k, f64::from(v) / 10.0)).collect();
                    ua(0, i, &sel)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn merge_is_commutative_and_idempotent(units in arb_units()) {
            let merged = merge_unit_attributions(&units, 0).unwrap();
            let mut reversed = units.clone();
            reversed.reverse();
            prop_assert_eq!(&merge_unit_attributions(&reversed, 0).unwrap(), &merged);

            let again = merge_unit_attributions(&[ua(0, 0, &merged.attributions)], 0).unwrap();
            prop_assert_eq!(&again, &merged);
            let doubled: Vec<_> = units.iter().chain(units.iter()).cloned().collect();
            prop_assert_eq!(&merge_unit_attributions(&doubled, 0).unwrap(), &merged);
        }
    }
}
