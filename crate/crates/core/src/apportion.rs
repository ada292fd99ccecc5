//! Largest-remainder (Hamilton) apportionment.
//!
//! Each entry first receives the floor of its exact quota; the units left
//! over go one each to the entries with the largest fractional remainders.
//! Equal remainders are resolved in favour of the lower index, so callers
//! encode their tie-break by ordering the input.

use alloc::vec;
use alloc::vec::Vec;

/// Remainders closer than this are treated as equal.
const REMAINDER_RESOLUTION: f64 = 1e-9;

/// Apportion `total` by non-negative integer weights. Exact.
///
/// Returns `None` when every weight is zero.
pub fn by_integers(total: u64, weights: &[u64]) -> Option<Vec<u64>> {
    let sum: u128 = weights.iter().map(|&w| w as u128).sum();
    if sum == 0 {
        return None;
    }
    let mut out = Vec::with_capacity(weights.len());
    let mut rems = Vec::with_capacity(weights.len());
    for &w in weights {
        let scaled = total as u128 * w as u128;
        out.push((scaled / sum) as u64);
        rems.push(scaled % sum);
    }
    let assigned: u64 = out.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| rems[b].cmp(&rems[a]).then(a.cmp(&b)));
    for &i in order.iter().take((total - assigned) as usize) {
        out[i] += 1;
    }
    Some(out)
}

/// Apportion `total` by non-negative real weights.
///
/// Returns `None` when no weight is positive. Negative or non-finite
/// weights are treated as zero.
pub fn by_reals(total: u64, weights: &[f64]) -> Option<Vec<u64>> {
    let clean: Vec<f64> = weights
        .iter()
        .map(|&w| if w.is_finite() && w > 0.0 { w } else { 0.0 })
        .collect();
    let sum: f64 = clean.iter().sum();
    if sum <= 0.0 || !sum.is_finite() {
        return None;
    }

    let mut out = vec![0u64; clean.len()];
    let mut rems = vec![0i64; clean.len()];
    for (i, &w) in clean.iter().enumerate() {
        let quota = total as f64 * (w / sum);
        let mut floor = libm::floor(quota);
        let mut rem = quota - floor;
        if rem > 1.0 - REMAINDER_RESOLUTION {
            floor += 1.0;
            rem = 0.0;
        }
        out[i] = floor as u64;
        rems[i] = libm::round(rem / REMAINDER_RESOLUTION) as i64;
    }

    let assigned: u64 = out.iter().sum();
    let mut order: Vec<usize> = (0..clean.len()).collect();
    order.sort_by(|&a, &b| rems[b].cmp(&rems[a]).then(a.cmp(&b)));
    if assigned <= total {
        for &i in order.iter().cycle().take((total - assigned) as usize) {
            out[i] += 1;
        }
    } else {
        // rounding pushed the floors past the total; take back from the
        // smallest remainders
        let mut excess = assigned - total;
        for &i in order.iter().rev() {
            if excess == 0 {
                break;
            }
            if out[i] > 0 {
                out[i] -= 1;
                excess -= 1;
            }
        }
    }
    Some(out)
}
