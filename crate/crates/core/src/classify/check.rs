//! Protocol conformance probe for external backends.

use std::collections::BTreeSet;
use std::path::Path;

use super::backend::{BackendDescriptor, BackendKind, ClassifyError};
use super::label::Classification;
use super::lexicon::Lexicon;
use super::protocol::{decode_response, ClassifyRequest, Fault, FaultClass, PROTOCOL_VERSION};
use super::transport::{HttpTransport, StdioTransport, Transport};

const PROBE_TEXTS: [&str; 5] = [
    "She founded the company and led it through two acquisitions.",
    "He is a caring friend who helps his neighbors.",
    "The report was filed on Tuesday.",
    "They won the national championship twice.",
    "She volunteers at the shelter every weekend.",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome {
    pub probe: &'static str,
    pub n_texts: usize,
    pub fault: Option<Fault>,
}

impl ProbeOutcome {
    pub fn line(&self) -> String {
        match &self.fault {
            None => format!("ok    {:<8} ({} texts)", self.probe, self.n_texts),
            Some(f) => format!("FAULT {:<8} [{}] {f}", self.probe, f.class()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub backend: String,
    pub outcomes: Vec<ProbeOutcome>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.fault.is_none())
    }

    pub fn fault_classes(&self) -> BTreeSet<FaultClass> {
        self.outcomes.iter().filter_map(|o| o.fault.as_ref().map(Fault::class)).collect()
    }
}

fn exchange(transport: &dyn Transport, probe: &str, texts: &[String]) -> Result<Vec<Classification>, Fault> {
    let id = format!("check-{probe}");
    let line = ClassifyRequest { v: PROTOCOL_VERSION, id: &id, texts }.to_line();
    let raw = transport.exchange(0, &line)?;
    decode_response(&raw, &id, texts.len())
}

/// Runs the probe sequence: an empty batch, a single text, a five-text batch,
/// and the same batch reversed (which must yield the reversed labels).
pub fn check_transport(backend: &str, transport: &dyn Transport) -> CheckReport {
    let texts: Vec<String> = PROBE_TEXTS.iter().map(|s| s.to_string()).collect();
    let reversed: Vec<String> = texts.iter().rev().cloned().collect();
    let mut outcomes = Vec::new();
    let mut record = |probe: &'static str, n: usize, r: Result<Vec<Classification>, Fault>| {
        let fault = r.as_ref().err().cloned();
        outcomes.push(ProbeOutcome { probe, n_texts: n, fault });
        r.ok()
    };
    record("empty", 0, exchange(transport, "empty", &[]));
    record("single", 1, exchange(transport, "single", &texts[..1]));
    let forward = record("batch", texts.len(), exchange(transport, "batch", &texts));
    let backward = exchange(transport, "reorder", &reversed).and_then(|back| match &forward {
        Some(fwd) if fwd.iter().rev().map(|c| c.label).ne(back.iter().map(|c| c.label)) => {
            Err(Fault::Inconsistent("labels change when the batch order is reversed".into()))
        }
        _ => Ok(back),
    });
    record("reorder", reversed.len(), backward);
    CheckReport { backend: backend.to_string(), outcomes }
}

/// Probes the backend named by `descriptor`. Lexicon backends are in-process
/// and only checked for loadability.
pub fn backend_check(descriptor: &BackendDescriptor) -> Result<CheckReport, ClassifyError> {
    let name = descriptor.to_string();
    match descriptor.kind {
        BackendKind::Lexicon => {
            if descriptor.endpoint != "seed" {
                Lexicon::from_file(Path::new(&descriptor.endpoint))?;
            }
            let outcomes = ["empty", "single", "batch", "reorder"]
                .into_iter()
                .zip([0, 1, PROBE_TEXTS.len(), PROBE_TEXTS.len()])
                .map(|(probe, n_texts)| ProbeOutcome { probe, n_texts, fault: None })
                .collect();
            Ok(CheckReport { backend: name, outcomes })
        }
        BackendKind::ExternalHttp => {
            Ok(check_transport(&name, &HttpTransport::new(&descriptor.endpoint, descriptor.timeout)))
        }
        BackendKind::ExternalStdio => {
            let t = StdioTransport::new(&descriptor.endpoint, descriptor.timeout, 1).map_err(ClassifyError::Setup)?;
            Ok(check_transport(&name, &t))
        }
    }
}
