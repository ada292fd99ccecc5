use alloc::string::String;
use alloc::vec;

use super::{metric_tokens, MetricError, TextEval};

/// Exact-match METEOR variant: no stemming or synonym stages.
///
/// Candidate tokens are aligned left to right to the earliest unused equal
/// reference token. `Fmean = 10PR / (R + 9P)`, penalty
/// `0.5 * (chunks / matches)^3`, score `Fmean * (1 - penalty)`; best
/// reference per candidate, averaged over candidates.
pub fn meteor_lite(eval: &TextEval) -> Result<f64, MetricError> {
    eval.validate()?;
    let mut sum = 0.0;
    for (cand, refs) in &eval.pairs {
        let c = metric_tokens(cand);
        let best = refs
            .iter()
            .map(|r| pair_score(&c, &metric_tokens(r)))
            .fold(0.0, f64::max);
        sum += best;
    }
    Ok(sum / eval.pairs.len() as f64)
}

fn pair_score(cand: &[String], reference: &[String]) -> f64 {
    let mut used = vec![false; reference.len()];
    let mut aligned: vec::Vec<(usize, usize)> = vec::Vec::new();
    for (i, tok) in cand.iter().enumerate() {
        if let Some(j) = (0..reference.len()).find(|&j| !used[j] && reference[j] == *tok) {
            used[j] = true;
            aligned.push((i, j));
        }
    }
    let m = aligned.len();
    if m == 0 {
        return 0.0;
    }
    let mut chunks = 1;
    for w in aligned.windows(2) {
        if !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1) {
            chunks += 1;
        }
    }
    let p = m as f64 / cand.len() as f64;
    let r = m as f64 / reference.len() as f64;
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    let frag = chunks as f64 / m as f64;
    let penalty = 0.5 * frag * frag * frag;
    fmean * (1.0 - penalty)
}
