use alloc::collections::{BTreeMap, BTreeSet};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::{ClassificationEval, MetricError};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct F1Scores {
    pub macro_f1: f64,
    pub micro_f1: f64,
    pub weighted_f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Class<'a> {
    Label(&'a str),
    /// Predictions outside the label set.
    Other,
}

#[derive(Default, Clone, Copy)]
struct Counts {
    tp: u64,
    fp: u64,
    fn_: u64,
}

/// Macro, micro and support-weighted F1. Classes without gold support are
/// left out of the macro and weighted means.
pub fn f1_suite(eval: &ClassificationEval) -> Result<F1Scores, MetricError> {
    if eval.pairs.is_empty() {
        return Err(MetricError::Empty);
    }
    let known: BTreeSet<&str> = eval
        .label_set
        .iter()
        .chain(eval.pairs.iter().map(|(g, _)| g))
        .map(|s| s.as_str())
        .collect();
    fn class_of<'a>(known: &BTreeSet<&str>, l: &'a str) -> Class<'a> {
        if known.contains(l) {
            Class::Label(l)
        } else {
            Class::Other
        }
    }

    let mut counts: BTreeMap<Class<'_>, Counts> = BTreeMap::new();
    let mut correct = 0u64;
    for (gold, pred) in &eval.pairs {
        let g = Class::Label(gold.as_str());
        let p = class_of(&known, pred);
        if g == p {
            counts.entry(g).or_default().tp += 1;
            correct += 1;
        } else {
            counts.entry(g).or_default().fn_ += 1;
            counts.entry(p).or_default().fp += 1;
        }
    }

    let n = eval.pairs.len() as f64;
    let mut macro_sum = 0.0;
    let mut supported = 0usize;
    let mut weighted = 0.0;
    for c in counts.values() {
        let support = c.tp + c.fn_;
        if support == 0 {
            continue;
        }
        let precision = if c.tp + c.fp > 0 {
            c.tp as f64 / (c.tp + c.fp) as f64
        } else {
            0.0
        };
        let recall = c.tp as f64 / support as f64;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        macro_sum += f1;
        supported += 1;
        weighted += f1 * support as f64;
    }
    Ok(F1Scores {
        macro_f1: macro_sum / supported as f64,
        micro_f1: correct as f64 / n,
        weighted_f1: weighted / n,
    })
}
