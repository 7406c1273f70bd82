#![allow(dead_code)]

use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use agency_audit::classify::{lexicon_classify, AgencyLabel, Lexicon};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn read_json<T: DeserializeOwned>(name: &str) -> T {
    let text = std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `|a − b| ≤ tol · max(1, |b|)`
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MockMode {
    Ok,
    LengthMismatch,
    BadLabel,
    TruncatedJson,
    Timeout(Duration),
    VersionMismatch,
    IdMismatch,
    BackendError,
    ScoreOutOfRange,
    ServerError,
}

/// Labels the way the in-process seed lexicon does, so mock-backed audits
/// can be compared with lexicon audits.
pub fn mock_labels(texts: &[String]) -> Vec<&'static str> {
    let lex = Lexicon::seed();
    texts.iter().map(|t| lexicon_classify(&lex, t, AgencyLabel::Communal).label.as_str()).collect()
}

fn mock_reply(mode: MockMode, body: &str) -> (u16, String) {
    let req: Value = match serde_json::from_str(body) {
        Ok(v) => v,
        Err(_) => return (400, "bad request".into()),
    };
    let id = req["id"].as_str().unwrap_or_default().to_string();
    let texts: Vec<String> = serde_json::from_value(req["texts"].clone()).unwrap_or_default();
    let mut labels = mock_labels(&texts);
    let ok = |labels: &[&str]| json!({"v": "1", "id": id, "labels": labels}).to_string();
    match mode {
        MockMode::Ok => (200, ok(&labels)),
        MockMode::LengthMismatch => {
            labels.push("agentic");
            (200, ok(&labels))
        }
        MockMode::BadLabel => (200, json!({"v": "1", "id": id, "labels": vec!["heroic"; texts.len()]}).to_string()),
        MockMode::TruncatedJson => {
            let full = ok(&labels);
            (200, full[..full.len() / 2].to_string())
        }
        MockMode::Timeout(d) => {
            thread::sleep(d);
            (200, ok(&labels))
        }
        MockMode::VersionMismatch => (200, json!({"v": "2", "id": id, "labels": labels}).to_string()),
        MockMode::IdMismatch => (200, json!({"v": "1", "id": "other", "labels": labels}).to_string()),
        MockMode::BackendError => (200, json!({"v": "1", "id": id, "error": "model not loaded"}).to_string()),
        MockMode::ScoreOutOfRange => {
            (200, json!({"v": "1", "id": id, "labels": labels, "scores": vec![1.5; texts.len()]}).to_string())
        }
        MockMode::ServerError => (500, "boom".into()),
    }
}

/// In-process HTTP classifier speaking the v1 protocol, with one fault
/// injected into every reply.
pub struct MockServer {
    pub url: String,
    pub requests: Arc<AtomicUsize>,
    server: Arc<tiny_http::Server>,
}

impl MockServer {
    pub fn start(mode: MockMode) -> Self {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").expect("bind mock server"));
        let url = format!("http://{}", server.server_addr().to_ip().expect("ip listener"));
        let requests = Arc::new(AtomicUsize::new(0));
        let (s, count) = (server.clone(), requests.clone());
        thread::spawn(move || {
            for mut request in s.incoming_requests() {
                count.fetch_add(1, Ordering::SeqCst);
                thread::spawn(move || {
                    let mut body = String::new();
                    let _ = request.as_reader().read_to_string(&mut body);
                    let (code, text) = if request.url() == "/v1/classify" {
                        mock_reply(mode, &body)
                    } else {
                        (404, "not found".into())
                    };
                    let _ = request.respond(tiny_http::Response::from_string(text).with_status_code(code));
                });
            }
        });
        MockServer { url, requests, server }
    }

    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.server.unblock();
    }
}

/// Writes an executable shell script into `dir` and returns its path.
pub fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

/// A stdio backend that answers the n-th request with the n-th line of
/// `responses` and logs every request it receives to `log`.
pub fn replay_backend(dir: &Path, responses: &[String], log: &Path) -> PathBuf {
    let resp = dir.join("responses.jsonl");
    std::fs::write(&resp, responses.iter().map(|r| format!("{r}\n")).collect::<String>()).unwrap();
    script(
        dir,
        "replay.sh",
        &format!(
            "exec 3< '{}'\nwhile IFS= read -r req; do\n  printf '%s\\n' \"$req\" >> '{}'\n  IFS= read -r out <&3 || exit 3\n  printf '%s\\n' \"$out\"\ndone",
            resp.display(),
            log.display()
        ),
    )
}
