//! Building a labeled agency dataset from generated paraphrases, and
//! rendering prompts for synthetic evaluation corpora.

mod annotate;
mod generate;
mod paraphrase;
mod prompts;
mod split;

use std::path::PathBuf;

use thiserror::Error;

pub use annotate::{
    assemble_records, drop_neutral, labeled_items, merge_annotations, parse_annotator_csv, read_annotator_csv,
    AnnotationLabel, AnnotationRecord, GeneratedItem, LabeledItem, MergeOutcome,
};
pub use generate::{
    read_transcript, run_generation, Clock, EndpointError, FixedClock, GenerationEndpoint, GenerationOptions,
    GenerationReply, GenerationSummary, HttpGenerator, PlanItem, SystemClock, TranscriptEntry,
};
pub use paraphrase::{paraphrase_items, parse_paraphrase_for, parse_paraphrase_response, ParaphrasePair};
pub use prompts::{
    clg_plan, names, render_clg_prompt, render_paraphrase_prompt, ClgItem, ClgKind, AGES, DEFAULT_AGENTIC_EXAMPLE,
    DEFAULT_COMMUNAL_EXAMPLE, DEPARTMENTS, GENDERS, OCCUPATIONS, RACES,
};
pub use split::{split_dataset, SplitSpec, Splits};

use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum LacError {
    #[error("sentence to rephrase is empty")]
    EmptySentence,
    #[error("unknown prompt kind {0:?}, expected biography, review or letter")]
    UnknownKind(String),
    #[error("{kind} prompt is missing descriptor(s): {}", names.join(", "))]
    MissingDescriptor { kind: ClgKind, names: Vec<String> },
    #[error("no JSON object found in response")]
    NoJsonObject,
    #[error("response has no {0:?} key")]
    MissingKey(&'static str),
    #[error("response key {0:?} is empty")]
    EmptyKey(&'static str),
    #[error("response key {0:?} is not a string")]
    NotAString(&'static str),
    #[error("agentic and communal paraphrases are identical")]
    IdenticalParaphrases,
    #[error("unknown annotation label {0:?}")]
    UnknownAnnotationLabel(String),
    #[error("item {item_id:?}: generator label must be agentic or communal, got {label}")]
    InvalidGeneratorLabel { item_id: String, label: AnnotationLabel },
    #[error("item {item_id:?}: need at least 2 human labels, got {got}")]
    TooFewHumanLabels { item_id: String, got: usize },
    #[error("item {0:?}: tiebreak label cannot be na")]
    InvalidTiebreak(String),
    #[error("no majority and no tiebreak label for: {}", .0.join(", "))]
    NoMajority(Vec<String>),
    #[error("no record survived annotation merging")]
    NothingSurvived,
    #[error("item {0:?} has no agentic/communal final label")]
    NotBinary(String),
    #[error("item {item_id:?} has no label from annotator {annotator}")]
    MissingAnnotation { item_id: String, annotator: usize },
    #[error("duplicate item id {0:?}")]
    DuplicateItem(String),
    #[error("split ratios {0:?} must be positive and sum to 1")]
    InvalidRatios([f64; 3]),
    #[error("cannot split an empty dataset")]
    EmptyDataset,
    #[error("{split} split would be empty for n={n}")]
    EmptySplit { split: &'static str, n: usize },
    #[error("generation failed for {item_id:?} after {attempts} attempt(s): {message}")]
    Generation { item_id: String, attempts: u32, message: String },
    #[error("journal line {line}: {message}")]
    Journal { line: usize, message: String },
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Stats(#[from] StatsError),
}
