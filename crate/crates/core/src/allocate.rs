//! Package allocation across (task, dataset) pairs.
//!
//! Task complexity is the mean output length of a pair's records; dataset
//! complexity is the total node energy of its graph. Both signals are
//! normalized over the active pairs, combined into one weight per pair, and
//! the packages above the per-pair floor are apportioned by largest
//! remainder.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::apportion;
use crate::energy::Energies;
use crate::instruct::{InstructionRecord, TaskKind};
use crate::tokenize::{count_tokens, TokenizerConfig};

/// Ordered lexicographically by (task name, dataset).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PairKey {
    pub task: TaskKind,
    pub dataset: String,
}

impl PairKey {
    pub fn new(task: TaskKind, dataset: impl Into<String>) -> Self {
        PairKey {
            task,
            dataset: dataset.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CombineRule {
    /// `task * dataset` of the normalized signals.
    #[default]
    Multiplicative,
    /// Mean of the normalized signals.
    Additive,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComplexityProfile {
    pub task_complexity: BTreeMap<PairKey, f64>,
    pub dataset_complexity: BTreeMap<String, u128>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PlanEntry {
    pub task: TaskKind,
    pub dataset: String,
    pub weight: f64,
    pub packages: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AllocationPlan {
    /// Sorted by (task, dataset).
    pub entries: Vec<PlanEntry>,
    pub total: u64,
    /// Every weight was zero and the split fell back to uniform.
    pub uniform_fallback: bool,
}

impl AllocationPlan {
    pub fn count(&self, key: &PairKey) -> Option<u64> {
        self.entries
            .iter()
            .find(|e| e.task == key.task && e.dataset == key.dataset)
            .map(|e| e.packages)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AllocationError {
    #[error("no records to measure")]
    EmptyRecords,
    #[error("no active (task, dataset) pairs")]
    NoActivePairs,
    #[error("pair {task}/{dataset} is listed twice")]
    DuplicatePair { task: TaskKind, dataset: String },
    #[error("{total} packages cannot give {pairs} pairs at least {min} each")]
    Infeasible { total: u64, pairs: usize, min: u64 },
    #[error("no complexity recorded for {task}/{dataset}")]
    MissingComplexity { task: TaskKind, dataset: String },
}

/// Mean output token count.
pub fn task_complexity(
    records: &[InstructionRecord],
    tokenizer: &TokenizerConfig,
) -> Result<f64, AllocationError> {
    if records.is_empty() {
        return Err(AllocationError::EmptyRecords);
    }
    let total: usize = records
        .iter()
        .map(|r| count_tokens(&r.output, tokenizer))
        .sum();
    Ok(total as f64 / records.len() as f64)
}

pub fn dataset_complexity(energies: &Energies) -> u128 {
    energies.total()
}

/// `min_packages` per entry plus largest-remainder shares of the rest.
/// Entries with equal remainders are served in input order.
pub fn apportion_packages(
    weights: &[f64],
    total: u64,
    min_packages: u64,
) -> Result<(Vec<u64>, bool), AllocationError> {
    let required = min_packages.saturating_mul(weights.len() as u64);
    if weights.is_empty() {
        return Err(AllocationError::NoActivePairs);
    }
    if total < required {
        return Err(AllocationError::Infeasible {
            total,
            pairs: weights.len(),
            min: min_packages,
        });
    }
    let rest = total - required;
    let (shares, fallback) = match apportion::by_reals(rest, weights) {
        Some(s) => (s, false),
        None => (
            apportion::by_integers(rest, &vec![1; weights.len()]).expect("non-empty"),
            true,
        ),
    };
    Ok((
        shares.into_iter().map(|s| s + min_packages).collect(),
        fallback,
    ))
}

pub fn allocation_plan(
    profile: &ComplexityProfile,
    active_pairs: &[PairKey],
    total_packages: u64,
    min_packages: u64,
    rule: CombineRule,
) -> Result<AllocationPlan, AllocationError> {
    let mut pairs: Vec<PairKey> = active_pairs.to_vec();
    pairs.sort();
    for w in pairs.windows(2) {
        if w[0] == w[1] {
            return Err(AllocationError::DuplicatePair {
                task: w[0].task,
                dataset: w[0].dataset.clone(),
            });
        }
    }
    let mut tasks = Vec::with_capacity(pairs.len());
    let mut datasets = Vec::with_capacity(pairs.len());
    for p in &pairs {
        let missing = || AllocationError::MissingComplexity {
            task: p.task,
            dataset: p.dataset.clone(),
        };
        let t = *profile.task_complexity.get(p).ok_or_else(missing)?;
        let d = *profile
            .dataset_complexity
            .get(&p.dataset)
            .ok_or_else(missing)?;
        tasks.push(if t.is_finite() && t > 0.0 { t } else { 0.0 });
        datasets.push(d as f64);
    }
    normalize(&mut tasks);
    normalize(&mut datasets);
    let weights: Vec<f64> = tasks
        .iter()
        .zip(&datasets)
        .map(|(t, d)| match rule {
            CombineRule::Multiplicative => t * d,
            CombineRule::Additive => (t + d) / 2.0,
        })
        .collect();
    let (counts, uniform_fallback) = apportion_packages(&weights, total_packages, min_packages)?;
    let entries = pairs
        .into_iter()
        .zip(weights)
        .zip(counts)
        .map(|((p, weight), packages)| PlanEntry {
            task: p.task,
            dataset: p.dataset,
            weight,
            packages,
        })
        .collect();
    Ok(AllocationPlan {
        entries,
        total: total_packages,
        uniform_fallback,
    })
}

fn normalize(v: &mut [f64]) {
    let sum: f64 = v.iter().sum();
    if sum > 0.0 {
        for x in v.iter_mut() {
            *x /= sum;
        }
    }
}
