//! Request/response carriers for external backends.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use super::protocol::Fault;

/// Sends one request line and returns one response line. `worker` selects a
/// connection slot so concurrent callers never share a stream.
pub trait Transport: Send + Sync {
    fn exchange(&self, worker: usize, request: &str) -> Result<String, Fault>;
}

struct StdioProcess {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl StdioProcess {
    fn spawn(program: &str, args: &[String]) -> Result<Self, Fault> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Fault::Transport(format!("cannot start {program:?}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(StdioProcess { child, stdin, lines: rx })
    }

    fn exit_code(&mut self) -> Option<i32> {
        self.child.wait().ok().and_then(|s| s.code())
    }
}

impl Drop for StdioProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Newline-delimited JSON over a child process's stdin/stdout. One process
/// per worker slot, started lazily and restarted after any fault.
pub struct StdioTransport {
    program: String,
    args: Vec<String>,
    timeout: Duration,
    slots: Vec<Mutex<Option<StdioProcess>>>,
}

impl StdioTransport {
    /// `command` is split on whitespace; no shell is involved.
    pub fn new(command: &str, timeout: Duration, workers: usize) -> Result<Self, Fault> {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts.next().ok_or_else(|| Fault::Transport("empty stdio command".into()))?;
        Ok(StdioTransport {
            program,
            args: parts.collect(),
            timeout,
            slots: (0..workers.max(1)).map(|_| Mutex::new(None)).collect(),
        })
    }
}

impl Transport for StdioTransport {
    fn exchange(&self, worker: usize, request: &str) -> Result<String, Fault> {
        let mut slot = self.slots[worker % self.slots.len()].lock().unwrap_or_else(|p| p.into_inner());
        if slot.is_none() {
            *slot = Some(StdioProcess::spawn(&self.program, &self.args)?);
        }
        let proc = slot.as_mut().expect("just spawned");
        let written = proc
            .stdin
            .write_all(request.as_bytes())
            .and_then(|_| proc.stdin.write_all(b"\n"))
            .and_then(|_| proc.stdin.flush());
        let outcome = match written {
            Err(_) => Err(Fault::BackendExit(proc.exit_code())),
            Ok(()) => match proc.lines.recv_timeout(self.timeout) {
                Ok(Ok(line)) => return Ok(line),
                Ok(Err(e)) => Err(Fault::Transport(e.to_string())),
                Err(RecvTimeoutError::Timeout) => Err(Fault::Timeout(self.timeout)),
                Err(RecvTimeoutError::Disconnected) => Err(Fault::BackendExit(proc.exit_code())),
            },
        };
        // The stream is out of sync after any fault; drop (and kill) the process.
        *slot = None;
        outcome
    }
}

/// HTTP POST of the request body to `<base>/v1/classify`.
pub struct HttpTransport {
    url: String,
    timeout: Duration,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(base_url: &str, timeout: Duration) -> Self {
        let base = base_url.trim_end_matches('/');
        let url = if base.ends_with("/v1/classify") { base.to_string() } else { format!("{base}/v1/classify") };
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        HttpTransport { url, timeout, agent }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

fn is_timeout(err: &ureq::Transport) -> bool {
    let mut source = std::error::Error::source(err);
    while let Some(e) = source {
        if let Some(io) = e.downcast_ref::<std::io::Error>() {
            if matches!(io.kind(), std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock) {
                return true;
            }
        }
        source = e.source();
    }
    err.to_string().contains("timed out")
}

impl Transport for HttpTransport {
    fn exchange(&self, _worker: usize, request: &str) -> Result<String, Fault> {
        match self.agent.post(&self.url).set("Content-Type", "application/json").send_string(request) {
            Ok(resp) => resp.into_string().map_err(|e| {
                if e.kind() == std::io::ErrorKind::TimedOut || e.kind() == std::io::ErrorKind::WouldBlock {
                    Fault::Timeout(self.timeout)
                } else {
                    Fault::MalformedJson(format!("unreadable body: {e}"))
                }
            }),
            Err(ureq::Error::Status(code, resp)) => {
                let body = resp.into_string().unwrap_or_default();
                Err(Fault::Transport(format!("HTTP {code}: {}", body.trim())))
            }
            Err(ureq::Error::Transport(t)) if is_timeout(&t) => Err(Fault::Timeout(self.timeout)),
            Err(ureq::Error::Transport(t)) => Err(Fault::Transport(t.to_string())),
        }
    }
}
