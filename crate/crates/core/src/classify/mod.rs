//! Sentence-level agency classification.
//!
//! Backends are the in-process lexicon baseline or any external process that
//! speaks the v1 wire protocol (see [`protocol`]) over stdio or HTTP. Every
//! backend is driven through a [`Classifier`], which caches results by
//! content hash so repeated sentences are classified once.

mod backend;
mod cache;
mod check;
mod eval;
mod label;
mod lexicon;
pub mod protocol;
pub mod transport;

pub use backend::{
    classify_batch, BackendDescriptor, BackendKind, ClassifyError, Classifier, ConnectOptions, DEFAULT_BATCH_SIZE,
    DEFAULT_TIMEOUT,
};
pub use cache::{content_hash, ClassificationCache, ContentHash};
pub use check::{backend_check, check_transport, CheckReport, ProbeOutcome};
pub use eval::{eval_classifier, EvalError, EvalMetrics};
pub use label::{AgencyLabel, Classification, UnknownLabel};
pub use lexicon::{
    classify_counts, lexicon_classify, lexicon_counts, Lexicon, LexiconCounts, LexiconError, MAX_PHRASE_TOKENS,
};
pub use protocol::{Fault, FaultClass};
