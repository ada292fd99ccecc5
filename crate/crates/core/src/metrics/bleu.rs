use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::{metric_tokens, MetricError, TextEval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct BleuConfig {
    /// Add one to matches and totals for n >= 2.
    pub add_one_smoothing: bool,
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], u64> {
    let mut m = BTreeMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Corpus-level BLEU with uniform weights over 1..=4-grams and the brevity
/// penalty against the closest reference length (shorter on ties).
pub fn bleu4(eval: &TextEval, cfg: BleuConfig) -> Result<f64, MetricError> {
    eval.validate()?;
    let mut matches = [0u64; 4];
    let mut totals = [0u64; 4];
    let mut cand_len = 0usize;
    let mut ref_len = 0usize;

    for (cand, refs) in &eval.pairs {
        let c = metric_tokens(cand);
        let rs: Vec<Vec<String>> = refs.iter().map(|r| metric_tokens(r)).collect();
        cand_len += c.len();
        ref_len += rs
            .iter()
            .map(|r| r.len())
            .min_by_key(|&l| (l.abs_diff(c.len()), l))
            .unwrap_or(0);
        for n in 1..=4 {
            let cc = ngram_counts(&c, n);
            let mut max_ref: BTreeMap<&[String], u64> = BTreeMap::new();
            for r in &rs {
                for (g, k) in ngram_counts(r, n) {
                    let e = max_ref.entry(g).or_insert(0);
                    *e = (*e).max(k);
                }
            }
            for (g, k) in cc {
                matches[n - 1] += k.min(max_ref.get(g).copied().unwrap_or(0));
                totals[n - 1] += k;
            }
        }
    }

    if cand_len == 0 {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    for i in 0..4 {
        let (m, t) = if cfg.add_one_smoothing && i > 0 {
            (matches[i] + 1, totals[i] + 1)
        } else {
            (matches[i], totals[i])
        };
        if m == 0 || t == 0 {
            return Ok(0.0);
        }
        log_sum += libm::log(m as f64 / t as f64);
    }
    let bp = if cand_len > ref_len {
        1.0
    } else {
        libm::exp(1.0 - ref_len as f64 / cand_len as f64)
    };
    Ok(bp * libm::exp(log_sum / 4.0))
}
