//! Scoring of downstream predictions.
//!
//! Text metrics tokenize with the unicode-words tokenizer (punctuation kept
//! as tokens) after lowercasing. All scores lie in `[0, 1]`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::tokenize::{tokens, TokenizerConfig};

mod bleu;
mod chrf;
mod f1;
mod meteor;
mod rouge;

pub use bleu::{bleu4, BleuConfig};
pub use chrf::chrf_pp;
pub use f1::{f1_suite, F1Scores};
pub use meteor::meteor_lite;
pub use rouge::{lcs_len, rouge_l};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("nothing to score")]
    Empty,
    #[error("candidate {0} has no reference")]
    NoReference(usize),
}

/// Gold/predicted label pairs over a declared label set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassificationEval {
    pub pairs: Vec<(String, String)>,
    pub label_set: Vec<String>,
}

/// Candidates with one or more references each.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TextEval {
    pub pairs: Vec<(String, Vec<String>)>,
}

impl TextEval {
    pub fn single(candidate: &str, reference: &str) -> Self {
        TextEval {
            pairs: alloc::vec![(candidate.to_string(), alloc::vec![reference.to_string()])],
        }
    }

    pub(crate) fn validate(&self) -> Result<(), MetricError> {
        if self.pairs.is_empty() {
            return Err(MetricError::Empty);
        }
        match self.pairs.iter().position(|(_, refs)| refs.is_empty()) {
            Some(i) => Err(MetricError::NoReference(i)),
            None => Ok(()),
        }
    }
}

/// Lowercased metric tokens.
pub fn metric_tokens(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    tokens(&lower, &TokenizerConfig::default())
        .into_iter()
        .map(String::from)
        .collect()
}
