//! Rule-based English sentence segmentation.
//!
//! A boundary is placed after a word ending in `.`, `!` or `?` (optionally
//! followed by closing quotes or brackets) when the next word starts with an
//! uppercase letter, a digit, or an opening quote. A bare `.` does not end a
//! sentence after a listed abbreviation, a single-letter initial, or a dotted
//! initialism such as `U.K.`; ellipses never end a sentence. Decimals like
//! `3.5` never split because a boundary needs whitespace after the period.
//!
//! Newlines are ordinary whitespace, except that a blank line (two newlines
//! in a row, possibly with spaces between) always ends the current sentence.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const SHIPPED_ABBREVIATIONS: &str = include_str!("../data/abbreviations.txt");

const CLOSERS: &[char] = &['"', '\'', '\u{201d}', '\u{2019}', ')', ']'];
const OPENERS: &[char] = &['"', '\'', '\u{201c}', '\u{2018}', '(', '['];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub index: usize,
}

/// Set of abbreviations, stored lowercase without the final period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abbreviations {
    tokens: HashSet<String>,
}

impl Abbreviations {
    /// Parses the plain-text list format: one token per line, `#` comments.
    pub fn parse(text: &str) -> Self {
        let tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(normalize_token)
            .collect();
        Abbreviations { tokens }
    }

    pub fn from_file(path: &Path) -> io::Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    /// The list shipped with the crate.
    pub fn shipped() -> &'static Abbreviations {
        static SHIPPED: OnceLock<Abbreviations> = OnceLock::new();
        SHIPPED.get_or_init(|| Abbreviations::parse(SHIPPED_ABBREVIATIONS))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.tokens.contains(&normalize_token(token))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn normalize_token(t: &str) -> String {
    let lower = t.to_lowercase();
    lower.strip_suffix('.').unwrap_or(&lower).to_string()
}

/// `J.` or `U.K.`: one or more single letters each followed by a period.
fn is_initialism(core: &str) -> bool {
    let mut chars = core.chars().peekable();
    let mut groups = 0;
    while let Some(c) = chars.next() {
        if !c.is_alphabetic() || chars.next() != Some('.') {
            return false;
        }
        groups += 1;
    }
    groups > 0
}

#[derive(Debug, Clone)]
pub struct Segmenter<'a> {
    abbreviations: &'a Abbreviations,
}

impl Default for Segmenter<'static> {
    fn default() -> Self {
        Segmenter { abbreviations: Abbreviations::shipped() }
    }
}

impl<'a> Segmenter<'a> {
    pub fn new(abbreviations: &'a Abbreviations) -> Self {
        Segmenter { abbreviations }
    }

    pub fn split(&self, text: &str) -> Vec<Sentence> {
        let mut out = Vec::new();
        let mut paragraph: Vec<&str> = Vec::new();
        for line in text.split('\n') {
            if line.trim().is_empty() {
                self.split_paragraph(&paragraph, &mut out);
                paragraph.clear();
            } else {
                paragraph.extend(line.split_whitespace());
            }
        }
        self.split_paragraph(&paragraph, &mut out);
        out
    }

    fn split_paragraph(&self, words: &[&str], out: &mut Vec<Sentence>) {
        let mut start = 0;
        for i in 0..words.len() {
            let last = i + 1 == words.len();
            if last || self.ends_sentence(words[i], words[i + 1]) {
                let text = words[start..=i].join(" ");
                out.push(Sentence { text, index: out.len() });
                start = i + 1;
            }
        }
    }

    fn ends_sentence(&self, word: &str, next: &str) -> bool {
        let core = word.trim_end_matches(CLOSERS);
        let Some(terminal) = core.chars().last() else {
            return false;
        };
        if !matches!(terminal, '.' | '!' | '?') {
            return false;
        }
        let starts_ok = next
            .chars()
            .next()
            .is_some_and(|c| c.is_uppercase() || c.is_ascii_digit() || OPENERS[..4].contains(&c));
        if !starts_ok {
            return false;
        }
        if core.ends_with("..") || core.ends_with('\u{2026}') {
            return false;
        }
        if terminal == '.' {
            let token = core.trim_start_matches(OPENERS);
            if is_initialism(token) || self.abbreviations.contains(token) {
                return false;
            }
        }
        true
    }
}

/// Splits with the shipped abbreviation list.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    Segmenter::default().split(text)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trimmed {
    pub sentences: Vec<Sentence>,
    /// True when nothing survived trimming.
    pub exhausted: bool,
}

/// Drops the first two sentences and the last one. Surviving sentences keep
/// their original indices.
pub fn wikibio_trim(sentences: &[Sentence]) -> Trimmed {
    if sentences.len() <= 3 {
        return Trimmed { sentences: Vec::new(), exhausted: true };
    }
    Trimmed { sentences: sentences[2..sentences.len() - 1].to_vec(), exhausted: false }
}
