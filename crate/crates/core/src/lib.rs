//! Language agency auditing for text corpora.
//!
//! The pipeline segments each document into sentences, classifies every
//! sentence as agentic or communal, turns those verdicts into per-document
//! agency percentages, and aggregates them over demographic groups with
//! significance tests and density series attached.
//!
//! - [`corpus`]: loading, balanced sampling, minimum-count stratum filtering
//! - [`segment`]: rule-based sentence splitting and biography trimming
//! - [`classify`]: lexicon baseline, external backend protocol, evaluation
//! - [`metrics`]: per-document agency, group summaries, full audits
//! - [`stats`]: t-tests, Fleiss' kappa, kernel density estimates
//! - [`lacbuild`]: building a labeled agency dataset from paraphrase generation
//! - [`cli`]: the subcommands behind the `agency-audit` binary

pub mod classify;
pub mod cli;
pub mod corpus;
pub mod fsutil;
pub mod lacbuild;
pub mod metrics;
pub mod rng;
pub mod segment;
pub mod stats;
