use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

/// Flag values win over the config file, which wins over built-in defaults.
pub(crate) trait Overlay {
    fn overlay(self, file: Self) -> Self;
}

impl<T> Overlay for Option<T> {
    fn overlay(self, file: Self) -> Self {
        self.or(file)
    }
}

impl<T> Overlay for Vec<T> {
    fn overlay(self, file: Self) -> Self {
        if self.is_empty() {
            file
        } else {
            self
        }
    }
}

impl Overlay for bool {
    fn overlay(self, file: Self) -> Self {
        self || file
    }
}

macro_rules! overlay_struct {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl Overlay for $ty {
            fn overlay(self, file: Self) -> Self {
                $ty { $($field: self.$field.overlay(file.$field)),* }
            }
        }
    };
}

#[derive(Debug, Parser)]
#[command(name = "agency-audit", version, about = "Measure language agency gaps across demographic groups")]
pub struct Cli {
    /// TOML file with one table per subcommand, keys named like the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Segment, classify and aggregate a corpus into report files.
    Audit(AuditArgs),
    /// Score a backend against gold-labeled sentences.
    Eval(EvalArgs),
    /// Render generation prompts and run them against an endpoint.
    Synth(SynthArgs),
    /// Merge annotator labels into a binary labeled dataset.
    Merge(MergeArgs),
    /// Seeded train/valid/test split of a JSONL dataset.
    Split(SplitArgs),
    /// Fleiss' kappa for a rating matrix or a set of annotator files.
    Kappa(KappaArgs),
    /// Probe an external backend for protocol conformance.
    BackendCheck(BackendCheckArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Audit(_) => "audit",
            Command::Eval(_) => "eval",
            Command::Synth(_) => "synth",
            Command::Merge(_) => "merge",
            Command::Split(_) => "split",
            Command::Kappa(_) => "kappa",
            Command::BackendCheck(_) => "backend-check",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct AuditArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// jsonl or csv; guessed from the extension when absent.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub id_col: Option<String>,
    #[arg(long)]
    pub text_col: Option<String>,
    /// Required attribute, `name` or `name=field`.
    #[arg(long = "attr")]
    #[serde(rename = "attr")]
    pub attrs: Vec<String>,
    /// Attribute that may be missing on some documents.
    #[arg(long = "optional-attr")]
    #[serde(rename = "optional-attr")]
    pub optional_attrs: Vec<String>,
    /// lexicon:<path>|lexicon:seed|http:<url>|stdio:<cmd>
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long = "group")]
    #[serde(rename = "group")]
    pub groups: Vec<String>,
    #[arg(long)]
    pub strata: Vec<String>,
    /// Drop the first two and the last sentence of every document.
    #[arg(long)]
    pub trim_wikibio: bool,
    #[arg(long)]
    pub tie_default: Option<String>,
    /// Pool sentences across a group's documents instead of averaging per document.
    #[arg(long)]
    pub pooled: bool,
    /// welch or pooled
    #[arg(long)]
    pub test: Option<String>,
    /// greater, less or two-sided
    #[arg(long)]
    pub alternative: Option<String>,
    /// `attr=a,b`: test group `a` against group `b` of `attr`.
    #[arg(long)]
    pub compare: Vec<String>,
    #[arg(long = "seed")]
    #[serde(rename = "seed")]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub kde_grid: Option<usize>,
    /// Replacement abbreviation list, one entry per line.
    #[arg(long)]
    pub abbreviations: Option<PathBuf>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
}

overlay_struct!(AuditArgs {
    corpus, format, id_col, text_col, attrs, optional_attrs, backend, groups, strata, trim_wikibio, tie_default,
    pooled, test, alternative, compare, seeds, threads, out, kde_grid, abbreviations, batch_size, timeout_ms,
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct EvalArgs {
    /// JSONL with `text` and `label` per line.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub tie_default: Option<String>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Directory for eval.json and eval.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

overlay_struct!(EvalArgs { gold, backend, tie_default, threads, batch_size, timeout_ms, out });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct SynthArgs {
    /// paraphrase, biography, review or letter
    #[arg(long)]
    pub kind: Option<String>,
    /// Sentences to rephrase, one per line (paraphrase only).
    #[arg(long)]
    pub sentences: Option<PathBuf>,
    #[arg(long)]
    pub agentic_example: Option<String>,
    #[arg(long)]
    pub communal_example: Option<String>,
    /// Base URL of the generation endpoint.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Transcript path; an existing transcript is resumed.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the rendered prompts to --out instead of generating.
    #[arg(long)]
    pub plan_only: bool,
    #[arg(long)]
    pub concurrency: Option<usize>,
    /// Maximum requests per second.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub max_retries: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
}

overlay_struct!(SynthArgs {
    kind, sentences, agentic_example, communal_example, endpoint, out, plan_only, concurrency, rate, max_retries,
    seed, timeout_ms,
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct MergeArgs {
    /// JSONL of items with `item_id`, `text`, `generator_label`.
    #[arg(long, conflicts_with = "transcript")]
    pub items: Option<PathBuf>,
    /// Paraphrase transcript from `synth --kind paraphrase`.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Annotator CSV (`item_id,label`), repeat once per annotator.
    #[arg(long = "annotator")]
    #[serde(rename = "annotator")]
    pub annotators: Vec<PathBuf>,
    #[arg(long)]
    pub tiebreak: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

overlay_struct!(MergeArgs { items, transcript, annotators, tiebreak, out });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// train,valid,test
    #[arg(long)]
    pub ratios: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for train.jsonl, valid.jsonl and test.jsonl.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

overlay_struct!(SplitArgs { input, ratios, seed, out });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct KappaArgs {
    /// CSV of per-item category counts, one column per category.
    #[arg(long, conflicts_with = "annotators")]
    pub counts: Option<PathBuf>,
    /// Annotator CSV (`item_id,label`); items rated by every file are used.
    #[arg(long = "annotator")]
    #[serde(rename = "annotator")]
    pub annotators: Vec<PathBuf>,
    /// Optional JSON output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

overlay_struct!(KappaArgs { counts, annotators, out });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct BackendCheckArgs {
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Optional JSON output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

overlay_struct!(BackendCheckArgs { backend, timeout_ms, out });
