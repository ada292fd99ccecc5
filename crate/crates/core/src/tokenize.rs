//! Deterministic token counting.
//!
//! `UnicodeWords` splits text into maximal runs of alphanumeric characters
//! (Unicode `Alphabetic` + `Numeric`); every other non-whitespace character
//! is a punctuation token of its own, counted only when
//! `count_punctuation` is set. `Whitespace` counts whitespace-separated runs.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TokenizerMode {
    #[default]
    UnicodeWords,
    Whitespace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TokenizerConfig {
    pub mode: TokenizerMode,
    pub count_punctuation: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            mode: TokenizerMode::UnicodeWords,
            count_punctuation: true,
        }
    }
}

impl TokenizerConfig {
    pub fn count(&self, text: &str) -> usize {
        count_tokens(text, self)
    }
}

pub fn count_tokens(text: &str, cfg: &TokenizerConfig) -> usize {
    match cfg.mode {
        TokenizerMode::Whitespace => text.split_whitespace().count(),
        TokenizerMode::UnicodeWords => {
            let mut count = 0;
            let mut in_word = false;
            for c in text.chars() {
                if c.is_alphanumeric() {
                    if !in_word {
                        count += 1;
                        in_word = true;
                    }
                } else {
                    in_word = false;
                    if cfg.count_punctuation && !c.is_whitespace() {
                        count += 1;
                    }
                }
            }
            count
        }
    }
}

/// The tokens themselves, as slices of `text`. `count_tokens` always equals
/// `tokens(..).len()`.
pub fn tokens<'a>(text: &'a str, cfg: &TokenizerConfig) -> Vec<&'a str> {
    match cfg.mode {
        TokenizerMode::Whitespace => text.split_whitespace().collect(),
        TokenizerMode::UnicodeWords => {
            let mut out = Vec::new();
            let mut start: Option<usize> = None;
            for (i, c) in text.char_indices() {
                if c.is_alphanumeric() {
                    start.get_or_insert(i);
                    continue;
                }
                if let Some(s) = start.take() {
                    out.push(&text[s..i]);
                }
                if cfg.count_punctuation && !c.is_whitespace() {
                    out.push(&text[i..i + c.len_utf8()]);
                }
            }
            if let Some(s) = start {
                out.push(&text[s..]);
            }
            out
        }
    }
}
