//! Per-document agency, group summaries and the full audit report.

mod agency;
mod audit;
mod report;

use thiserror::Error;

use crate::classify::ClassifyError;
use crate::corpus::CorpusError;
use crate::stats::StatsError;

pub use agency::{doc_agency, group_summary, group_summary_with, Averaging, DocAgency, GroupSummary};
pub use audit::{audit, AuditOptions, AuditReport, Comparison, ReportConfig, SkippedDocs, TestRecord, REPORT_VERSION};
pub use report::{bars_csv, kde_csv, report_json, tables_csv, write_report_dir, REPORT_FILES};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("document {0:?} has no classified sentences")]
    UnmeasurableDocument(String),
    #[error("group {0:?} has no documents")]
    EmptyGroup(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no document could be measured ({skipped} skipped)")]
    NothingMeasured { skipped: usize },
    #[error("invalid comparison {0:?}, expected attr=a,b")]
    InvalidComparison(String),
    #[error("comparison attribute {0:?} is not a grouping attribute")]
    ComparisonNotGrouped(String),
    #[error("attribute {0:?} is used both for grouping and stratification")]
    OverlappingAttrs(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
    #[error("serializing report: {0}")]
    Json(#[from] serde_json::Error),
}
