use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{metric_tokens, MetricError, TextEval};

const CHAR_ORDER: usize = 6;
const WORD_ORDER: usize = 2;
const ORDERS: usize = CHAR_ORDER + WORD_ORDER;
const BETA: f64 = 2.0;

/// Per order: (hypothesis n-grams, reference n-grams, matched n-grams).
type Stats = [[u64; 3]; ORDERS];

fn count<T: Ord + Clone>(items: &[T], n: usize) -> BTreeMap<Vec<T>, u64> {
    let mut m = BTreeMap::new();
    if items.len() >= n {
        for w in items.windows(n) {
            *m.entry(w.to_vec()).or_insert(0) += 1;
        }
    }
    m
}

fn overlap<T: Ord>(h: &BTreeMap<T, u64>, r: &BTreeMap<T, u64>) -> [u64; 3] {
    let matched = h
        .iter()
        .map(|(g, k)| (*k).min(r.get(g).copied().unwrap_or(0)))
        .sum();
    [h.values().sum(), r.values().sum(), matched]
}

fn sentence_stats(hyp: &str, reference: &str) -> Stats {
    let chars = |s: &str| {
        s.to_lowercase()
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<Vec<char>>()
    };
    let (hc, rc) = (chars(hyp), chars(reference));
    let (hw, rw): (Vec<String>, Vec<String>) = (metric_tokens(hyp), metric_tokens(reference));
    let mut stats = [[0u64; 3]; ORDERS];
    for n in 1..=CHAR_ORDER {
        stats[n - 1] = overlap(&count(&hc, n), &count(&rc, n));
    }
    for n in 1..=WORD_ORDER {
        stats[CHAR_ORDER + n - 1] = overlap(&count(&hw, n), &count(&rw, n));
    }
    stats
}

/// F-beta of precision and recall averaged over the orders where both
/// sides have n-grams.
fn score(stats: &Stats) -> f64 {
    let (mut p, mut r, mut effective) = (0.0, 0.0, 0usize);
    for &[hyp, reference, matched] in stats {
        if hyp > 0 && reference > 0 {
            p += matched as f64 / hyp as f64;
            r += matched as f64 / reference as f64;
            effective += 1;
        }
    }
    if effective == 0 {
        return 0.0;
    }
    p /= effective as f64;
    r /= effective as f64;
    let b2 = BETA * BETA;
    if p + r == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / (b2 * p + r)
    }
}

/// Corpus-level chrF++: character 1..=6-grams (whitespace removed) and word
/// 1..=2-grams, beta = 2. Statistics are summed over the corpus, taking for
/// each candidate the reference with the best sentence-level score.
pub fn chrf_pp(eval: &TextEval) -> Result<f64, MetricError> {
    eval.validate()?;
    let mut total = [[0u64; 3]; ORDERS];
    for (cand, refs) in &eval.pairs {
        let mut best: Option<(f64, Stats)> = None;
        for r in refs {
            let s = sentence_stats(cand, r);
            let f = score(&s);
            if best.as_ref().is_none_or(|(bf, _)| f > *bf) {
                best = Some((f, s));
            }
        }
        let (_, s) = best.expect("validated non-empty references");
        for (t, x) in total.iter_mut().zip(s.iter()) {
            for k in 0..3 {
                t[k] += x[k];
            }
        }
    }
    Ok(score(&total))
}
