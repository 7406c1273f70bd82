use serde::{Deserialize, Serialize};

use crate::classify::{AgencyLabel, Classification};
use crate::corpus::GroupKey;

use super::MetricsError;

/// Agency statistics for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocAgency {
    pub doc_id: String,
    pub n_sentences: usize,
    pub n_agentic: usize,
    pub n_communal: usize,
    pub pct_agentic: f64,
    pub pct_communal: f64,
    /// `pct_agentic − pct_communal`.
    pub gap: f64,
}

impl DocAgency {
    pub fn from_counts(doc_id: impl Into<String>, n_agentic: usize, n_communal: usize) -> Result<Self, MetricsError> {
        let doc_id = doc_id.into();
        let n = n_agentic + n_communal;
        if n == 0 {
            return Err(MetricsError::UnmeasurableDocument(doc_id));
        }
        let pct_agentic = 100.0 * n_agentic as f64 / n as f64;
        let pct_communal = 100.0 * n_communal as f64 / n as f64;
        Ok(DocAgency {
            doc_id,
            n_sentences: n,
            n_agentic,
            n_communal,
            pct_agentic,
            pct_communal,
            gap: pct_agentic - pct_communal,
        })
    }
}

pub fn doc_agency(doc_id: &str, classifications: &[Classification]) -> Result<DocAgency, MetricsError> {
    let n_agentic = classifications.iter().filter(|c| c.label == AgencyLabel::Agentic).count();
    DocAgency::from_counts(doc_id, n_agentic, classifications.len() - n_agentic)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Mean of per-document percentages.
    #[default]
    Macro,
    /// Percentages over all sentences of the group pooled together.
    Pooled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: String,
    pub key: GroupKey,
    pub n_docs: usize,
    pub n_sentences: usize,
    pub averaging: Averaging,
    pub avg_pct_agentic: f64,
    pub avg_pct_communal: f64,
    /// Always exactly `avg_pct_agentic − avg_pct_communal`.
    pub avg_gap: f64,
    /// Per-document gaps in input order.
    pub doc_gaps: Vec<f64>,
}

pub fn group_summary(docs: &[DocAgency], group: GroupKey) -> Result<GroupSummary, MetricsError> {
    group_summary_with(docs, group, Averaging::Macro)
}

pub fn group_summary_with(docs: &[DocAgency], group: GroupKey, averaging: Averaging) -> Result<GroupSummary, MetricsError> {
    if docs.is_empty() {
        return Err(MetricsError::EmptyGroup(group.to_string()));
    }
    let n_sentences: usize = docs.iter().map(|d| d.n_sentences).sum();
    let (avg_pct_agentic, avg_pct_communal) = match averaging {
        Averaging::Macro => {
            let n = docs.len() as f64;
            (
                docs.iter().map(|d| d.pct_agentic).sum::<f64>() / n,
                docs.iter().map(|d| d.pct_communal).sum::<f64>() / n,
            )
        }
        Averaging::Pooled => {
            let a: usize = docs.iter().map(|d| d.n_agentic).sum();
            let c: usize = docs.iter().map(|d| d.n_communal).sum();
            (100.0 * a as f64 / n_sentences as f64, 100.0 * c as f64 / n_sentences as f64)
        }
    };
    Ok(GroupSummary {
        group: group.to_string(),
        key: group,
        n_docs: docs.len(),
        n_sentences,
        averaging,
        avg_pct_agentic,
        avg_pct_communal,
        avg_gap: avg_pct_agentic - avg_pct_communal,
        doc_gaps: docs.iter().map(|d| d.gap).collect(),
    })
}
