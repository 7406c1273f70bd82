use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Binary agency verdict. Neutral exists only during annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgencyLabel {
    Agentic,
    Communal,
}

impl AgencyLabel {
    pub const ALL: [AgencyLabel; 2] = [AgencyLabel::Agentic, AgencyLabel::Communal];

    pub fn as_str(self) -> &'static str {
        match self {
            AgencyLabel::Agentic => "agentic",
            AgencyLabel::Communal => "communal",
        }
    }

    /// Row/column position in confusion matrices.
    pub fn index(self) -> usize {
        match self {
            AgencyLabel::Agentic => 0,
            AgencyLabel::Communal => 1,
        }
    }
}

impl fmt::Display for AgencyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown agency label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for AgencyLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "agentic" => Ok(AgencyLabel::Agentic),
            "communal" => Ok(AgencyLabel::Communal),
            other => Err(UnknownLabel(other.to_string())),
        }
    }
}

/// A label with the confidence for that label, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: AgencyLabel,
    pub score: f64,
}

impl Classification {
    pub fn new(label: AgencyLabel, score: f64) -> Self {
        Classification { label, score }
    }
}
