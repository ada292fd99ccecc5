use alloc::vec;

use super::{metric_tokens, MetricError, TextEval};

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F1 (beta = 1), best reference per candidate, averaged over
/// candidates.
pub fn rouge_l(eval: &TextEval) -> Result<f64, MetricError> {
    eval.validate()?;
    let mut sum = 0.0;
    for (cand, refs) in &eval.pairs {
        let c = metric_tokens(cand);
        let mut best: f64 = 0.0;
        for r in refs {
            let r = metric_tokens(r);
            let l = lcs_len(&c, &r);
            if l == 0 {
                continue;
            }
            let p = l as f64 / c.len() as f64;
            let rc = l as f64 / r.len() as f64;
            best = best.max(2.0 * p * rc / (p + rc));
        }
        sum += best;
    }
    Ok(sum / eval.pairs.len() as f64)
}
