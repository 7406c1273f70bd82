use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use super::cache::{content_hash, ClassificationCache, ContentHash};
use super::label::{AgencyLabel, Classification};
use super::lexicon::{Lexicon, LexiconError};
use super::protocol::{decode_response, ClassifyRequest, Fault, PROTOCOL_VERSION};
use super::transport::{HttpTransport, StdioTransport, Transport};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("batch {batch} [{}]: {fault}", fault.class())]
    Batch { batch: usize, fault: Fault },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("invalid backend {0:?} (expected lexicon:<path>|lexicon:seed|http:<url>|stdio:<cmd>)")]
    InvalidDescriptor(String),
    #[error("backend setup failed: {0}")]
    Setup(Fault),
    #[error("classification cache: {0}")]
    Cache(#[from] std::io::Error),
}

impl ClassifyError {
    pub fn fault(&self) -> Option<&Fault> {
        match self {
            ClassifyError::Batch { fault, .. } | ClassifyError::Setup(fault) => Some(fault),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Lexicon,
    ExternalStdio,
    ExternalHttp,
}

pub const DEFAULT_BATCH_SIZE: usize = 32;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// How to reach a classifier. `endpoint` is a lexicon path (or `seed`), a
/// base URL, or a command line depending on `kind`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendDescriptor {
    pub kind: BackendKind,
    pub endpoint: String,
    pub protocol_version: String,
    pub batch_size: usize,
    pub timeout: Duration,
    /// Label for zero-match and tied lexicon sentences.
    pub tie_default: AgencyLabel,
}

impl BackendDescriptor {
    fn with(kind: BackendKind, endpoint: &str) -> Self {
        BackendDescriptor {
            kind,
            endpoint: endpoint.to_string(),
            protocol_version: PROTOCOL_VERSION.to_string(),
            batch_size: DEFAULT_BATCH_SIZE,
            timeout: DEFAULT_TIMEOUT,
            tie_default: AgencyLabel::Communal,
        }
    }

    pub fn seed_lexicon() -> Self {
        Self::with(BackendKind::Lexicon, "seed")
    }

    pub fn lexicon_file(path: &Path) -> Self {
        Self::with(BackendKind::Lexicon, &path.display().to_string())
    }

    pub fn http(url: &str) -> Self {
        Self::with(BackendKind::ExternalHttp, url)
    }

    pub fn stdio(command: &str) -> Self {
        Self::with(BackendKind::ExternalStdio, command)
    }

    pub fn batch_size(mut self, n: usize) -> Self {
        self.batch_size = n.max(1);
        self
    }

    pub fn timeout(mut self, t: Duration) -> Self {
        self.timeout = t;
        self
    }

    pub fn tie_default(mut self, label: AgencyLabel) -> Self {
        self.tie_default = label;
        self
    }
}

impl fmt::Display for BackendDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            BackendKind::Lexicon => "lexicon",
            BackendKind::ExternalHttp => "http",
            BackendKind::ExternalStdio => "stdio",
        };
        write!(f, "{prefix}:{}", self.endpoint)
    }
}

impl FromStr for BackendDescriptor {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| ClassifyError::InvalidDescriptor(s.to_string()))?;
        if rest.trim().is_empty() {
            return Err(ClassifyError::InvalidDescriptor(s.to_string()));
        }
        match kind {
            "lexicon" => Ok(Self::with(BackendKind::Lexicon, rest)),
            // `http:` keeps the scheme: `http:http://host:port`, or the short
            // form `http://host:port` itself.
            "http" | "https" if rest.starts_with("//") => Ok(Self::http(s)),
            "http" => Ok(Self::http(rest)),
            "stdio" => Ok(Self::stdio(rest)),
            _ => Err(ClassifyError::InvalidDescriptor(s.to_string())),
        }
    }
}

type BatchResult = Result<Vec<Classification>, Fault>;

enum Engine {
    Lexicon(Lexicon),
    External(Box<dyn Transport>),
}

#[derive(Debug, Clone, Default)]
pub struct ConnectOptions {
    /// Concurrent external requests; 0 is treated as 1.
    pub workers: usize,
    /// Persistent cache directory. `None` keeps the cache in memory.
    pub cache_dir: Option<PathBuf>,
}

/// A connected backend plus its per-run cache.
pub struct Classifier {
    descriptor: BackendDescriptor,
    engine: Engine,
    identity: String,
    cache: ClassificationCache,
    workers: usize,
}

impl fmt::Debug for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Classifier").field("identity", &self.identity).field("workers", &self.workers).finish()
    }
}

impl Classifier {
    pub fn connect(descriptor: &BackendDescriptor) -> Result<Self, ClassifyError> {
        Self::connect_with(descriptor, &ConnectOptions::default())
    }

    pub fn connect_with(descriptor: &BackendDescriptor, opts: &ConnectOptions) -> Result<Self, ClassifyError> {
        let workers = opts.workers.max(1);
        let engine = match descriptor.kind {
            BackendKind::Lexicon if descriptor.endpoint == "seed" => Engine::Lexicon(Lexicon::seed()),
            BackendKind::Lexicon => Engine::Lexicon(Lexicon::from_file(Path::new(&descriptor.endpoint))?),
            BackendKind::ExternalHttp => {
                Engine::External(Box::new(HttpTransport::new(&descriptor.endpoint, descriptor.timeout)))
            }
            BackendKind::ExternalStdio => Engine::External(Box::new(
                StdioTransport::new(&descriptor.endpoint, descriptor.timeout, workers).map_err(ClassifyError::Setup)?,
            )),
        };
        Self::assemble(descriptor.clone(), engine, workers, opts.cache_dir.as_deref())
    }

    pub fn from_lexicon(lexicon: Lexicon, tie_default: AgencyLabel) -> Self {
        let descriptor = BackendDescriptor::seed_lexicon().tie_default(tie_default);
        Self::assemble(descriptor, Engine::Lexicon(lexicon), 1, None).expect("no cache dir, no io")
    }

    /// Wraps a custom transport, e.g. an in-process mock.
    pub fn from_transport(descriptor: BackendDescriptor, transport: Box<dyn Transport>, workers: usize) -> Self {
        Self::assemble(descriptor, Engine::External(transport), workers.max(1), None).expect("no cache dir, no io")
    }

    fn assemble(
        descriptor: BackendDescriptor,
        engine: Engine,
        workers: usize,
        cache_dir: Option<&Path>,
    ) -> Result<Self, ClassifyError> {
        let identity = match &engine {
            Engine::Lexicon(lex) => format!("lexicon:{}:tie={}", lex.digest(), descriptor.tie_default),
            Engine::External(_) => format!("{descriptor}:v{}", descriptor.protocol_version),
        };
        let cache = match cache_dir {
            Some(dir) => ClassificationCache::persistent(dir, &identity)?,
            None => ClassificationCache::in_memory(),
        };
        Ok(Classifier { descriptor, engine, identity, cache, workers })
    }

    /// Stable string naming the backend and everything that affects its
    /// output. Lexicon identities use the lexicon digest, not the path.
    pub fn identity(&self) -> &str {
        &self.identity
    }

    pub fn descriptor(&self) -> &BackendDescriptor {
        &self.descriptor
    }

    pub fn cache(&self) -> &ClassificationCache {
        &self.cache
    }

    pub fn flush_cache(&self) -> std::io::Result<()> {
        self.cache.flush()
    }

    /// Order- and length-preserving classification. Each distinct text is
    /// classified at most once per cache lifetime; uncached texts go out in
    /// batches of `batch_size`, fanned across the worker pool.
    pub fn classify_batch(&self, sentences: &[String]) -> Result<Vec<Classification>, ClassifyError> {
        let hashes: Vec<ContentHash> = sentences.iter().map(|s| content_hash(s)).collect();
        let mut seen = std::collections::HashSet::new();
        let mut misses: Vec<(ContentHash, &String)> = Vec::new();
        for (h, s) in hashes.iter().zip(sentences) {
            if self.cache.get(h).is_none() && seen.insert(*h) {
                misses.push((*h, s));
            }
        }
        match &self.engine {
            Engine::Lexicon(lex) => {
                for (h, s) in &misses {
                    self.cache.insert(*h, lex.classify(s, self.descriptor.tie_default));
                }
            }
            Engine::External(transport) => {
                let texts: Vec<String> = misses.iter().map(|(_, s)| (*s).clone()).collect();
                let results = self.run_batches(transport.as_ref(), &texts)?;
                for ((h, _), c) in misses.iter().zip(results) {
                    self.cache.insert(*h, c);
                }
            }
        }
        Ok(hashes.iter().map(|h| self.cache.get(h).expect("classified above")).collect())
    }

    fn run_batches(&self, transport: &dyn Transport, texts: &[String]) -> Result<Vec<Classification>, ClassifyError> {
        let chunks: Vec<&[String]> = texts.chunks(self.descriptor.batch_size.max(1)).collect();
        let slots: Vec<Mutex<Option<BatchResult>>> = chunks.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        let failed = AtomicBool::new(false);
        let workers = self.workers.min(chunks.len()).max(1);
        thread::scope(|scope| {
            for w in 0..workers {
                let (chunks, slots, next, failed) = (&chunks, &slots, &next, &failed);
                scope.spawn(move || loop {
                    if failed.load(Ordering::Relaxed) {
                        break;
                    }
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= chunks.len() {
                        break;
                    }
                    let id = format!("b{i}");
                    let line = ClassifyRequest { v: &self.descriptor.protocol_version, id: &id, texts: chunks[i] }.to_line();
                    let result = transport.exchange(w, &line).and_then(|raw| decode_response(&raw, &id, chunks[i].len()));
                    if result.is_err() {
                        failed.store(true, Ordering::Relaxed);
                    }
                    *slots[i].lock().unwrap_or_else(|p| p.into_inner()) = Some(result);
                });
            }
        });
        let mut out = Vec::with_capacity(texts.len());
        for (batch, slot) in slots.into_iter().enumerate() {
            match slot.into_inner().unwrap_or_else(|p| p.into_inner()) {
                Some(Ok(cs)) => out.extend(cs),
                Some(Err(fault)) => return Err(ClassifyError::Batch { batch, fault }),
                // Batches are claimed in index order, so a skipped batch always
                // follows a failed one that returned above.
                None => unreachable!("batch {batch} skipped without an earlier failure"),
            }
        }
        Ok(out)
    }
}

/// One-shot convenience: connect, classify, drop.
pub fn classify_batch(backend: &BackendDescriptor, sentences: &[String]) -> Result<Vec<Classification>, ClassifyError> {
    if sentences.is_empty() {
        return Ok(Vec::new());
    }
    Classifier::connect(backend)?.classify_batch(sentences)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_parsing() {
        let d: BackendDescriptor = "lexicon:seed".parse().unwrap();
        assert_eq!(d.kind, BackendKind::Lexicon);
        let d: BackendDescriptor = "http:http://127.0.0.1:9000".parse().unwrap();
        assert_eq!((d.kind, d.endpoint.as_str()), (BackendKind::ExternalHttp, "http://127.0.0.1:9000"));
        let d: BackendDescriptor = "http://127.0.0.1:9000".parse().unwrap();
        assert_eq!(d.endpoint, "http://127.0.0.1:9000");
        let d: BackendDescriptor = "stdio:python3 serve.py --stdio".parse().unwrap();
        assert_eq!((d.kind, d.endpoint.as_str()), (BackendKind::ExternalStdio, "python3 serve.py --stdio"));
        assert!("grpc:x".parse::<BackendDescriptor>().is_err());
        assert!("lexicon:".parse::<BackendDescriptor>().is_err());
        assert!("nocolon".parse::<BackendDescriptor>().is_err());
    }

    #[test]
    fn lexicon_backend_delegates() {
        let lex = Lexicon::seed();
        let c = Classifier::from_lexicon(lex.clone(), AgencyLabel::Communal);
        let s: Vec<String> = ["She led the team.", "He helped everyone.", "The sky is blue."].map(String::from).to_vec();
        let got = c.classify_batch(&s).unwrap();
        let want: Vec<_> = s.iter().map(|x| lex.classify(x, AgencyLabel::Communal)).collect();
        assert_eq!(got, want);
        assert!(classify_batch(&BackendDescriptor::seed_lexicon(), &[]).unwrap().is_empty());
    }

    struct Echo {
        calls: AtomicUsize,
    }

    impl Transport for Echo {
        fn exchange(&self, _w: usize, request: &str) -> Result<String, Fault> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            let v: serde_json::Value = serde_json::from_str(request).unwrap();
            let n = v["texts"].as_array().unwrap().len();
            let labels: Vec<&str> = v["texts"]
                .as_array()
                .unwrap()
                .iter()
                .map(|t| if t.as_str().unwrap().len() % 2 == 0 { "agentic" } else { "communal" })
                .collect();
            Ok(serde_json::json!({"v": "1", "id": v["id"], "labels": labels, "scores": vec![0.8; n]}).to_string())
        }
    }

    #[test]
    fn duplicates_served_from_cache() {
        let echo = Box::new(Echo { calls: AtomicUsize::new(0) });
        let d = BackendDescriptor::http("http://unused").batch_size(2);
        let c = Classifier::from_transport(d, echo, 3);
        let s: Vec<String> = ["aa", "b", "aa", "cccc", "b", "ddd"].map(String::from).to_vec();
        let out = c.classify_batch(&s).unwrap();
        assert_eq!(out.len(), 6);
        assert_eq!(out[0], out[2]);
        assert_eq!(out[1], out[4]);
        assert_eq!(out[0].label, AgencyLabel::Agentic);
        assert_eq!(out[5].label, AgencyLabel::Communal);
        assert_eq!(c.cache().len(), 4);
        assert_eq!(c.classify_batch(&s).unwrap(), out);
    }

    struct FailAt(usize);

    impl Transport for FailAt {
        fn exchange(&self, _w: usize, request: &str) -> Result<String, Fault> {
            let v: serde_json::Value = serde_json::from_str(request).unwrap();
            let id = v["id"].as_str().unwrap().to_string();
            let n = v["texts"].as_array().unwrap().len();
            let label = if id == format!("b{}", self.0) { "bogus" } else { "agentic" };
            Ok(serde_json::json!({"v": "1", "id": id, "labels": vec![label; n]}).to_string())
        }
    }

    #[test]
    fn failure_reports_batch_index() {
        let s: Vec<String> = (0..10).map(|i| format!("sentence {i}")).collect();
        for workers in [1, 4] {
            let c = Classifier::from_transport(BackendDescriptor::http("http://unused").batch_size(3), Box::new(FailAt(2)), workers);
            match c.classify_batch(&s) {
                Err(ClassifyError::Batch { batch: 2, fault: Fault::UnknownLabel(l) }) => assert_eq!(l, "bogus"),
                other => panic!("unexpected {other:?}"),
            }
        }
    }
}
