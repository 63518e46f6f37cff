//! Word matching between a vocabulary and discourse text.
//!
//! Three policies are supported. `normalized-token` segments text on Unicode
//! word boundaries and compares tokens after optional NFKC and case folding.
//! `exact-token` splits on whitespace and compares raw strings. `substring`
//! tests containment of the normalized word inside the normalized text, which
//! is the only useful mode for scripts written without spaces.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

use crate::corpus::{DiscourseUnit, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    NormalizedToken,
    ExactToken,
    Substring,
}

impl MatchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::NormalizedToken => "normalized-token",
            MatchMode::ExactToken => "exact-token",
            MatchMode::Substring => "substring",
        }
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "normalized-token" => Ok(MatchMode::NormalizedToken),
            "exact-token" => Ok(MatchMode::ExactToken),
            "substring" => Ok(MatchMode::Substring),
            other => Err(format!("unknown match mode `{other}`")),
        }
    }
}

/// How target words are recognised in unit text.
///
/// `case_fold` and `unicode_normalize` apply to the `normalized-token` and
/// `substring` modes; `exact-token` compares raw whitespace-separated tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchPolicy {
    pub mode: MatchMode,
    pub case_fold: bool,
    pub unicode_normalize: bool,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        MatchPolicy {
            mode: MatchMode::NormalizedToken,
            case_fold: true,
            unicode_normalize: true,
        }
    }
}

impl MatchPolicy {
    pub fn exact() -> Self {
        MatchPolicy {
            mode: MatchMode::ExactToken,
            case_fold: false,
            unicode_normalize: false,
        }
    }

    pub fn substring() -> Self {
        MatchPolicy {
            mode: MatchMode::Substring,
            ..MatchPolicy::default()
        }
    }

    /// True when `normalize` can change its input.
    pub fn normalizes(&self) -> bool {
        self.mode != MatchMode::ExactToken && (self.case_fold || self.unicode_normalize)
    }

    pub fn normalize(&self, s: &str) -> String {
        if self.mode == MatchMode::ExactToken {
            return s.to_owned();
        }
        let nfkc: String = if self.unicode_normalize {
            s.nfkc().collect()
        } else {
            s.to_owned()
        };
        if self.case_fold {
            // lowercasing can denormalize a handful of code points
            let folded = nfkc.to_lowercase();
            if self.unicode_normalize {
                folded.nfkc().collect()
            } else {
                folded
            }
        } else {
            nfkc
        }
    }

    /// Tokens of `text` under this policy, in order, duplicates kept.
    ///
    /// Substring mode has no notion of tokens for matching, but keyword
    /// suggestion still needs candidates, so it segments like
    /// `normalized-token`.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        match self.mode {
            MatchMode::ExactToken => text.split_whitespace().map(str::to_owned).collect(),
            MatchMode::NormalizedToken | MatchMode::Substring => self
                .normalize(text)
                .unicode_words()
                .map(str::to_owned)
                .collect(),
        }
    }
}

/// A vocabulary compiled against one policy, reusable across units.
#[derive(Debug, Clone)]
pub struct Matcher {
    policy: MatchPolicy,
    // first token -> (word index, full token sequence)
    by_first_token: HashMap<String, Vec<(usize, Vec<String>)>>,
    normalized_words: Vec<String>,
}

impl Matcher {
    pub fn new(vocab: &Vocabulary, policy: MatchPolicy) -> Self {
        let mut by_first_token: HashMap<String, Vec<(usize, Vec<String>)>> = HashMap::new();
        let mut normalized_words = Vec::with_capacity(vocab.len());
        for (idx, word) in vocab.words().iter().enumerate() {
            normalized_words.push(policy.normalize(word));
            if policy.mode == MatchMode::Substring {
                continue;
            }
            let tokens = policy.tokenize(word);
            if let Some(first) = tokens.first() {
                by_first_token
                    .entry(first.clone())
                    .or_default()
                    .push((idx, tokens));
            }
        }
        Matcher {
            policy,
            by_first_token,
            normalized_words,
        }
    }

    pub fn policy(&self) -> MatchPolicy {
        self.policy
    }

    pub fn match_text(&self, text: &str) -> BTreeSet<usize> {
        let mut found = BTreeSet::new();
        match self.policy.mode {
            MatchMode::Substring => {
                let haystack = self.policy.normalize(text);
                for (idx, word) in self.normalized_words.iter().enumerate() {
                    if !word.is_empty() && haystack.contains(word.as_str()) {
                        found.insert(idx);
                    }
                }
            }
            MatchMode::NormalizedToken | MatchMode::ExactToken => {
                let tokens = self.policy.tokenize(text);
                for (pos, token) in tokens.iter().enumerate() {
                    let Some(candidates) = self.by_first_token.get(token) else {
                        continue;
                    };
                    for (idx, seq) in candidates {
                        if tokens[pos..].starts_with(seq) {
                            found.insert(*idx);
                        }
                    }
                }
            }
        }
        found
    }
}

/// Indices of vocabulary words present in `unit` under `policy`.
pub fn match_words(
    unit: &DiscourseUnit,
    vocab: &Vocabulary,
    policy: MatchPolicy,
) -> BTreeSet<usize> {
    Matcher::new(vocab, policy).match_text(&unit.text)
}
