use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::LacError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReply {
    pub text: String,
    /// Whatever else the endpoint reported (model, temperature, ...).
    pub meta: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointError {
    pub message: String,
    pub retryable: bool,
}

impl EndpointError {
    pub fn retryable(message: impl Into<String>) -> Self {
        EndpointError { message: message.into(), retryable: true }
    }

    pub fn fatal(message: impl Into<String>) -> Self {
        EndpointError { message: message.into(), retryable: false }
    }
}

pub trait GenerationEndpoint: Send + Sync {
    fn generate(&self, prompt: &str, seed: Option<u64>) -> Result<GenerationReply, EndpointError>;
}

/// `POST <base>/v1/generate` with `{"prompt", "seed"?}`, answered by `{"text", ...}`.
pub struct HttpGenerator {
    url: String,
    agent: ureq::Agent,
}

impl HttpGenerator {
    pub fn new(base_url: &str, timeout: Duration) -> Self {
        let url = format!("{}/v1/generate", base_url.trim_end_matches('/'));
        HttpGenerator { url, agent: ureq::AgentBuilder::new().timeout(timeout).build() }
    }
}

impl GenerationEndpoint for HttpGenerator {
    fn generate(&self, prompt: &str, seed: Option<u64>) -> Result<GenerationReply, EndpointError> {
        let mut body = serde_json::json!({ "prompt": prompt });
        if let Some(s) = seed {
            body["seed"] = s.into();
        }
        let request = self.agent.post(&self.url).set("Content-Type", "application/json");
        let resp = match request.send_string(&body.to_string()) {
            Ok(r) => r,
            Err(ureq::Error::Status(code, resp)) => {
                let msg = format!("HTTP {code}: {}", resp.into_string().unwrap_or_default().trim());
                return Err(EndpointError { message: msg, retryable: code == 429 || code >= 500 });
            }
            Err(ureq::Error::Transport(t)) => return Err(EndpointError::retryable(t.to_string())),
        };
        let raw = resp.into_string().map_err(|e| EndpointError::retryable(format!("reading reply: {e}")))?;
        let mut value: Value = serde_json::from_str(&raw).map_err(|e| EndpointError::retryable(format!("bad reply: {e}")))?;
        let text = match value.get_mut("text").map(Value::take) {
            Some(Value::String(s)) => s,
            _ => return Err(EndpointError::retryable("reply has no \"text\" string")),
        };
        let meta = match value {
            Value::Object(mut m) => {
                m.remove("text");
                (!m.is_empty()).then_some(Value::Object(m))
            }
            _ => None,
        };
        Ok(GenerationReply { text, meta })
    }
}

pub trait Clock: Send + Sync {
    /// Milliseconds since the Unix epoch.
    fn now_ms(&self) -> u64;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
    }
}

pub struct FixedClock(pub u64);

impl Clock for FixedClock {
    fn now_ms(&self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanItem {
    pub item_id: String,
    pub prompt: String,
}

#[derive(Debug, Clone)]
pub struct GenerationOptions {
    /// Extra attempts after the first failure.
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
    /// Minimum spacing between request starts across all workers.
    pub min_interval: Option<Duration>,
    pub concurrency: usize,
    pub seed: Option<u64>,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        GenerationOptions {
            max_retries: 3,
            initial_backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(8),
            min_interval: None,
            concurrency: 1,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub item_id: String,
    pub prompt: String,
    pub response: String,
    pub ts: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

/// Reads a transcript. A torn final line (from an interrupted append) is cut
/// off the file; corruption anywhere else is an error.
pub fn read_transcript(path: &Path) -> Result<Vec<TranscriptEntry>, LacError> {
    let io_err = |e| LacError::Io { path: path.to_path_buf(), source: e };
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(e)),
    };
    let mut entries = Vec::new();
    let mut good_len = 0u64;
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    let mut lineno = 0;
    loop {
        line.clear();
        let n = reader.read_line(&mut line).map_err(io_err)?;
        if n == 0 {
            break;
        }
        lineno += 1;
        if !line.ends_with('\n') {
            OpenOptions::new().write(true).open(path).and_then(|f| f.set_len(good_len)).map_err(io_err)?;
            break;
        }
        good_len += n as u64;
        if line.trim().is_empty() {
            continue;
        }
        let entry = serde_json::from_str(line.trim_end())
            .map_err(|e| LacError::Journal { line: lineno, message: e.to_string() })?;
        entries.push(entry);
    }
    Ok(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub planned: usize,
    /// Items already present in the journal.
    pub resumed: usize,
    /// Items generated by this run.
    pub generated: usize,
    /// Endpoint calls made, including retries.
    pub requests: usize,
}

struct RateLimiter {
    interval: Option<Duration>,
    next: Mutex<Option<Instant>>,
}

impl RateLimiter {
    fn wait(&self) {
        let Some(interval) = self.interval else { return };
        let slot = {
            let mut next = self.next.lock().unwrap();
            let now = Instant::now();
            let slot = next.map_or(now, |n| n.max(now));
            *next = Some(slot + interval);
            slot
        };
        let now = Instant::now();
        if slot > now {
            thread::sleep(slot - now);
        }
    }
}

/// Runs every plan item not yet in the journal at `journal`, appending one
/// transcript line per completed item. On failure the journal keeps all
/// completed items, so a rerun picks up where this one stopped.
pub fn run_generation(
    plan: &[PlanItem],
    endpoint: &dyn GenerationEndpoint,
    options: &GenerationOptions,
    journal: &Path,
    clock: &dyn Clock,
) -> Result<GenerationSummary, LacError> {
    let mut ids = BTreeSet::new();
    for item in plan {
        if !ids.insert(item.item_id.as_str()) {
            return Err(LacError::DuplicateItem(item.item_id.clone()));
        }
    }
    let done: BTreeSet<String> = read_transcript(journal)?.into_iter().map(|e| e.item_id).collect();
    let pending: Vec<&PlanItem> = plan.iter().filter(|p| !done.contains(&p.item_id)).collect();
    let mut summary = GenerationSummary { planned: plan.len(), resumed: plan.len() - pending.len(), ..Default::default() };
    if pending.is_empty() {
        if !journal.exists() {
            fs::write(journal, b"").map_err(|e| LacError::Io { path: journal.to_path_buf(), source: e })?;
        }
        return Ok(summary);
    }

    let io_err = |e| LacError::Io { path: journal.to_path_buf(), source: e };
    if let Some(dir) = journal.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let file = Mutex::new(OpenOptions::new().create(true).append(true).open(journal).map_err(io_err)?);
    let limiter = RateLimiter { interval: options.min_interval, next: Mutex::new(None) };
    let next = AtomicUsize::new(0);
    let requests = AtomicUsize::new(0);
    let generated = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let failure: Mutex<Option<LacError>> = Mutex::new(None);

    let worker = || {
        while !stop.load(Ordering::SeqCst) {
            let i = next.fetch_add(1, Ordering::SeqCst);
            let Some(item) = pending.get(i) else { break };
            let mut backoff = options.initial_backoff;
            let mut attempt = 0;
            let outcome = loop {
                limiter.wait();
                requests.fetch_add(1, Ordering::SeqCst);
                match endpoint.generate(&item.prompt, options.seed) {
                    Ok(reply) => break Ok(reply),
                    Err(e) if e.retryable && attempt < options.max_retries => {
                        attempt += 1;
                        thread::sleep(backoff);
                        backoff = (backoff * 2).min(options.max_backoff);
                    }
                    Err(e) => {
                        break Err(LacError::Generation { item_id: item.item_id.clone(), attempts: attempt + 1, message: e.message })
                    }
                }
            };
            let result = outcome.and_then(|reply| {
                let entry = TranscriptEntry {
                    item_id: item.item_id.clone(),
                    prompt: item.prompt.clone(),
                    response: reply.text,
                    ts: clock.now_ms(),
                    meta: reply.meta,
                };
                let mut line = serde_json::to_string(&entry).expect("transcript entry serializes");
                line.push('\n');
                let mut f = file.lock().unwrap();
                f.write_all(line.as_bytes()).and_then(|_| f.flush()).map_err(io_err)
            });
            match result {
                Ok(()) => {
                    generated.fetch_add(1, Ordering::SeqCst);
                }
                Err(e) => {
                    stop.store(true, Ordering::SeqCst);
                    failure.lock().unwrap().get_or_insert(e);
                }
            }
        }
    };
    thread::scope(|s| {
        for _ in 0..options.concurrency.max(1) {
            s.spawn(worker);
        }
    });

    summary.generated = generated.into_inner();
    summary.requests = requests.into_inner();
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Echo {
        fail_on: Option<&'static str>,
        flaky: AtomicUsize,
    }

    impl GenerationEndpoint for Echo {
        fn generate(&self, prompt: &str, _seed: Option<u64>) -> Result<GenerationReply, EndpointError> {
            if self.flaky.load(Ordering::SeqCst) > 0 {
                self.flaky.fetch_sub(1, Ordering::SeqCst);
                return Err(EndpointError::retryable("busy"));
            }
            if Some(prompt) == self.fail_on {
                return Err(EndpointError::fatal("refused"));
            }
            Ok(GenerationReply { text: format!("re: {prompt}"), meta: None })
        }
    }

    fn plan(n: usize) -> Vec<PlanItem> {
        (0..n).map(|i| PlanItem { item_id: format!("i{i}"), prompt: format!("p{i}") }).collect()
    }

    fn fast() -> GenerationOptions {
        GenerationOptions { initial_backoff: Duration::from_millis(1), ..Default::default() }
    }

    #[test]
    fn resume_after_failure() {
        let dir = tempfile::tempdir().unwrap();
        let j = dir.path().join("t.jsonl");
        let ep = Echo { fail_on: Some("p3"), flaky: AtomicUsize::new(0) };
        let err = run_generation(&plan(6), &ep, &fast(), &j, &FixedClock(7)).unwrap_err();
        assert!(matches!(err, LacError::Generation { attempts: 1, .. }));
        assert_eq!(read_transcript(&j).unwrap().len(), 3);
        let ep = Echo { fail_on: None, flaky: AtomicUsize::new(2) };
        let s = run_generation(&plan(6), &ep, &fast(), &j, &FixedClock(7)).unwrap();
        assert_eq!((s.resumed, s.generated, s.requests), (3, 3, 5));
        let t = read_transcript(&j).unwrap();
        assert_eq!(t.iter().map(|e| e.item_id.as_str()).collect::<Vec<_>>(), ["i0", "i1", "i2", "i3", "i4", "i5"]);
        assert_eq!(t[4].response, "re: p4");
    }

    #[test]
    fn torn_tail_is_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let j = dir.path().join("t.jsonl");
        let ep = Echo { fail_on: None, flaky: AtomicUsize::new(0) };
        run_generation(&plan(2), &ep, &fast(), &j, &FixedClock(0)).unwrap();
        let mut f = OpenOptions::new().append(true).open(&j).unwrap();
        f.write_all(b"{\"item_id\":\"i2\",\"pro").unwrap();
        let s = run_generation(&plan(3), &ep, &fast(), &j, &FixedClock(0)).unwrap();
        assert_eq!((s.resumed, s.generated), (2, 1));
        assert_eq!(read_transcript(&j).unwrap().len(), 3);
        fs::write(&j, "garbage\n{}\n").unwrap();
        assert!(matches!(read_transcript(&j), Err(LacError::Journal { line: 1, .. })));
    }

    #[test]
    fn empty_plan_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let j = dir.path().join("t.jsonl");
        let ep = Echo { fail_on: None, flaky: AtomicUsize::new(0) };
        let s = run_generation(&[], &ep, &fast(), &j, &FixedClock(0)).unwrap();
        assert_eq!(s, GenerationSummary::default());
        assert_eq!(fs::read(&j).unwrap(), b"");
        let mut p = plan(2);
        p[1].item_id = "i0".into();
        assert!(matches!(run_generation(&p, &ep, &fast(), &j, &FixedClock(0)), Err(LacError::DuplicateItem(_))));
    }

    #[test]
    fn concurrent_run_covers_plan() {
        let dir = tempfile::tempdir().unwrap();
        let j = dir.path().join("t.jsonl");
        let ep = Echo { fail_on: None, flaky: AtomicUsize::new(0) };
        let opts = GenerationOptions { concurrency: 4, min_interval: Some(Duration::from_millis(1)), ..fast() };
        let s = run_generation(&plan(20), &ep, &opts, &j, &FixedClock(0)).unwrap();
        assert_eq!(s.generated, 20);
        let ids: BTreeSet<String> = read_transcript(&j).unwrap().into_iter().map(|e| e.item_id).collect();
        assert_eq!(ids.len(), 20);
    }
}
