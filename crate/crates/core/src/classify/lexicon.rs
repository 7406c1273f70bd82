//! String-matching baseline over agentic and communal word lists.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::label::{AgencyLabel, Classification};

const SEED_LEXICON: &str = include_str!("../../data/seed_lexicon.toml");

pub const MAX_PHRASE_TOKENS: usize = 4;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid lexicon file: {0}")]
    Parse(String),
    #[error("entry {0:?} appears in both the agentic and communal lists")]
    Overlap(String),
    #[error("entry {0:?} has more than {MAX_PHRASE_TOKENS} tokens")]
    PhraseTooLong(String),
    #[error("entry {0:?} contains no word characters")]
    EmptyEntry(String),
}

#[derive(Deserialize)]
struct LexiconFile {
    agentic: Vec<String>,
    communal: Vec<String>,
}

/// Splits lowercase text into word tokens. A token is a run of alphanumeric
/// characters; an apostrophe or hyphen joins two such runs (`she's`,
/// `self-made`). Everything else separates tokens.
pub(crate) fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let joins = is_joiner(c) && !cur.is_empty() && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() || joins {
            cur.push(c);
        } else if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

pub(crate) fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '-' | '\u{2019}')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LexiconCounts {
    pub agentic: usize,
    pub communal: usize,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: HashMap<Vec<String>, AgencyLabel>,
    longest: usize,
    digest: String,
}

impl Lexicon {
    pub fn new<S: AsRef<str>>(agentic: &[S], communal: &[S]) -> Result<Self, LexiconError> {
        let mut entries = HashMap::new();
        let mut longest = 0;
        let mut hasher = Sha256::new();
        for (label, words) in [(AgencyLabel::Agentic, agentic), (AgencyLabel::Communal, communal)] {
            let mut normalized: Vec<Vec<String>> = Vec::new();
            for w in words {
                let tokens = tokenize(w.as_ref());
                if tokens.is_empty() {
                    return Err(LexiconError::EmptyEntry(w.as_ref().to_string()));
                }
                if tokens.len() > MAX_PHRASE_TOKENS {
                    return Err(LexiconError::PhraseTooLong(w.as_ref().to_string()));
                }
                normalized.push(tokens);
            }
            normalized.sort();
            normalized.dedup();
            hasher.update(label.as_str());
            for tokens in normalized {
                hasher.update([0u8]);
                hasher.update(tokens.join(" "));
                longest = longest.max(tokens.len());
                if let Some(prev) = entries.insert(tokens.clone(), label) {
                    if prev != label {
                        return Err(LexiconError::Overlap(tokens.join(" ")));
                    }
                }
            }
            hasher.update([1u8]);
        }
        let digest = hex::encode(&hasher.finalize()[..8]);
        Ok(Lexicon { entries, longest, digest })
    }

    /// Parses `agentic = [...]` / `communal = [...]` TOML.
    pub fn parse_toml(text: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile = toml::from_str(text).map_err(|e| LexiconError::Parse(e.to_string()))?;
        Self::new(&file.agentic, &file.communal)
    }

    pub fn from_file(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_toml(&text)
    }

    /// The small illustrative lexicon shipped with the crate.
    pub fn seed() -> Self {
        Self::parse_toml(SEED_LEXICON).expect("shipped seed lexicon is valid")
    }

    /// Short stable fingerprint of the normalized entry sets.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Case-insensitive whole-word matches, longest phrase first, non-overlapping,
    /// scanning left to right.
    pub fn counts(&self, sentence: &str) -> LexiconCounts {
        let tokens = tokenize(sentence);
        let mut counts = LexiconCounts::default();
        let mut i = 0;
        while i < tokens.len() {
            let max = self.longest.min(tokens.len() - i);
            let hit = (1..=max).rev().find_map(|len| self.entries.get(&tokens[i..i + len]).map(|l| (len, *l)));
            match hit {
                Some((len, AgencyLabel::Agentic)) => {
                    counts.agentic += 1;
                    i += len;
                }
                Some((len, AgencyLabel::Communal)) => {
                    counts.communal += 1;
                    i += len;
                }
                None => i += 1,
            }
        }
        counts
    }

    pub fn classify(&self, sentence: &str, tie_default: AgencyLabel) -> Classification {
        classify_counts(self.counts(sentence), tie_default)
    }
}

pub fn lexicon_counts(lexicon: &Lexicon, sentence: &str) -> LexiconCounts {
    lexicon.counts(sentence)
}

pub fn lexicon_classify(lexicon: &Lexicon, sentence: &str, tie_default: AgencyLabel) -> Classification {
    lexicon.classify(sentence, tie_default)
}

/// Majority label with score `max / (agentic + communal)`; ties and zero
/// matches give `tie_default` at 0.5.
pub fn classify_counts(counts: LexiconCounts, tie_default: AgencyLabel) -> Classification {
    let LexiconCounts { agentic, communal } = counts;
    if agentic == communal {
        return Classification::new(tie_default, 0.5);
    }
    let total = (agentic + communal) as f64;
    if agentic > communal {
        Classification::new(AgencyLabel::Agentic, agentic as f64 / total)
    } else {
        Classification::new(AgencyLabel::Communal, communal as f64 / total)
    }
}
