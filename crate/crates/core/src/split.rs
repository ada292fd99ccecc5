//! Seeded train/validation/test splits.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::apportion;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SplitUnit {
    #[default]
    Node,
    Graph,
    Record,
}

impl SplitUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitUnit::Node => "node",
            SplitUnit::Graph => "graph",
            SplitUnit::Record => "record",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SplitSpec {
    /// train : validation : test
    pub ratios: [u32; 3],
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub unit: SplitUnit,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error("nothing to split")]
    Empty,
    #[error("split ratios must not all be zero")]
    ZeroRatios,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub val: Vec<T>,
    pub test: Vec<T>,
}

/// Partition sizes for `n` items: largest remainder over the ratios, ties
/// going to the earlier partition.
pub fn partition_sizes(n: usize, ratios: [u32; 3]) -> Result<[usize; 3], SplitError> {
    let w = ratios.map(|r| r as u64);
    let s = apportion::by_integers(n as u64, &w).ok_or(SplitError::ZeroRatios)?;
    Ok([s[0] as usize, s[1] as usize, s[2] as usize])
}

/// Seeded shuffle, then contiguous cuts at the partition sizes.
pub fn split<T: Clone>(items: &[T], spec: &SplitSpec) -> Result<Split<T>, SplitError> {
    if items.is_empty() {
        return Err(SplitError::Empty);
    }
    let [a, b, _] = partition_sizes(items.len(), spec.ratios)?;
    let mut order: Vec<usize> = (0..items.len()).collect();
    seed::shuffle(
        &mut order,
        &mut seed::rng(spec.seed, "split", spec.unit.as_str()),
    );
    let take = |r: core::ops::Range<usize>| {
        order[r]
            .iter()
            .map(|&i| items[i].clone())
            .collect::<Vec<T>>()
    };
    Ok(Split {
        train: take(0..a),
        val: take(a..a + b),
        test: take(a + b..items.len()),
    })
}
