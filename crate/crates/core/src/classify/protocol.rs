//! Classifier backend wire protocol, version 1.
//!
//! Request: `{"v": "1", "id": "<batch-id>", "texts": [...]}`.
//! Response: `{"v": "1", "id": "<batch-id>", "labels": [...], "scores": [...]}`.
//! `scores` may be omitted, in which case every score is 1.0. Unknown fields
//! are ignored. A response carrying an `"error"` field is a backend error.

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::label::{AgencyLabel, Classification};

pub const PROTOCOL_VERSION: &str = "1";

#[derive(Debug, Serialize)]
pub struct ClassifyRequest<'a> {
    pub v: &'a str,
    pub id: &'a str,
    pub texts: &'a [String],
}

impl ClassifyRequest<'_> {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("request serializes")
    }
}

#[derive(Debug, Deserialize)]
struct RawResponse {
    v: Option<serde_json::Value>,
    id: Option<serde_json::Value>,
    labels: Option<Vec<serde_json::Value>>,
    scores: Option<Vec<serde_json::Value>>,
    error: Option<serde_json::Value>,
}

/// Everything that can go wrong in one request/response exchange.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Fault {
    #[error("malformed response: {0}")]
    MalformedJson(String),
    #[error("protocol version {found:?}, expected {expected:?}")]
    VersionMismatch { expected: String, found: String },
    #[error("response id {found:?} does not match request id {expected:?}")]
    IdMismatch { expected: String, found: String },
    #[error("sent {expected} texts, got {labels} labels and {scores:?} scores")]
    LengthMismatch { expected: usize, labels: usize, scores: Option<usize> },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("score {0} outside [0, 1]")]
    ScoreOutOfRange(String),
    #[error("backend reported an error: {0}")]
    BackendError(String),
    #[error("no response within {0:?}")]
    Timeout(Duration),
    #[error("backend exited ({})", exit_display(.0))]
    BackendExit(Option<i32>),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("responses are not consistent across requests: {0}")]
    Inconsistent(String),
}

fn exit_display(code: &Option<i32>) -> String {
    match code {
        Some(c) => format!("status {c}"),
        None => "killed by signal".to_string(),
    }
}

/// Coarse fault categories, distinct per failure mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultClass {
    MalformedJson,
    VersionMismatch,
    IdMismatch,
    LengthMismatch,
    UnknownLabel,
    ScoreOutOfRange,
    BackendError,
    Timeout,
    BackendExit,
    Transport,
    Inconsistent,
}

impl FaultClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FaultClass::MalformedJson => "malformed-json",
            FaultClass::VersionMismatch => "version-mismatch",
            FaultClass::IdMismatch => "id-mismatch",
            FaultClass::LengthMismatch => "length-mismatch",
            FaultClass::UnknownLabel => "unknown-label",
            FaultClass::ScoreOutOfRange => "score-out-of-range",
            FaultClass::BackendError => "backend-error",
            FaultClass::Timeout => "timeout",
            FaultClass::BackendExit => "backend-exit",
            FaultClass::Transport => "transport",
            FaultClass::Inconsistent => "inconsistent",
        }
    }
}

impl fmt::Display for FaultClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Fault {
    pub fn class(&self) -> FaultClass {
        match self {
            Fault::MalformedJson(_) => FaultClass::MalformedJson,
            Fault::VersionMismatch { .. } => FaultClass::VersionMismatch,
            Fault::IdMismatch { .. } => FaultClass::IdMismatch,
            Fault::LengthMismatch { .. } => FaultClass::LengthMismatch,
            Fault::UnknownLabel(_) => FaultClass::UnknownLabel,
            Fault::ScoreOutOfRange(_) => FaultClass::ScoreOutOfRange,
            Fault::BackendError(_) => FaultClass::BackendError,
            Fault::Timeout(_) => FaultClass::Timeout,
            Fault::BackendExit(_) => FaultClass::BackendExit,
            Fault::Transport(_) => FaultClass::Transport,
            Fault::Inconsistent(_) => FaultClass::Inconsistent,
        }
    }
}

fn value_as_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Validates one response line against the request it answers.
pub fn decode_response(raw: &str, request_id: &str, n_texts: usize) -> Result<Vec<Classification>, Fault> {
    let resp: RawResponse = serde_json::from_str(raw.trim()).map_err(|e| Fault::MalformedJson(e.to_string()))?;
    if let Some(err) = resp.error {
        return Err(Fault::BackendError(value_as_string(&err)));
    }
    let version = resp.v.as_ref().map(value_as_string).unwrap_or_default();
    if version != PROTOCOL_VERSION {
        return Err(Fault::VersionMismatch { expected: PROTOCOL_VERSION.into(), found: version });
    }
    let id = resp.id.as_ref().map(value_as_string).unwrap_or_default();
    if id != request_id {
        return Err(Fault::IdMismatch { expected: request_id.into(), found: id });
    }
    let labels = resp.labels.ok_or_else(|| Fault::MalformedJson("missing \"labels\"".into()))?;
    let scores_len = resp.scores.as_ref().map(Vec::len);
    if labels.len() != n_texts || scores_len.is_some_and(|s| s != n_texts) {
        return Err(Fault::LengthMismatch { expected: n_texts, labels: labels.len(), scores: scores_len });
    }
    let mut out = Vec::with_capacity(n_texts);
    for (i, l) in labels.iter().enumerate() {
        let label: AgencyLabel = match l {
            serde_json::Value::String(s) => s.parse().map_err(|_| Fault::UnknownLabel(s.clone()))?,
            other => return Err(Fault::UnknownLabel(other.to_string())),
        };
        let score = match &resp.scores {
            None => 1.0,
            Some(scores) => match scores[i].as_f64() {
                Some(s) if (0.0..=1.0).contains(&s) => s,
                _ => return Err(Fault::ScoreOutOfRange(scores[i].to_string())),
            },
        };
        out.push(Classification::new(label, score));
    }
    Ok(out)
}
