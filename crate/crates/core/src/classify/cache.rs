//! Content-addressed classification cache.
//!
//! Entries are keyed by the SHA-256 of the sentence text within one backend
//! identity. When a directory is configured, entries persist as JSONL in
//! `<dir>/<identity-hash>.jsonl`; a different identity never sees them.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::label::{AgencyLabel, Classification};

pub type ContentHash = [u8; 32];

pub fn content_hash(text: &str) -> ContentHash {
    Sha256::digest(text.as_bytes()).into()
}

#[derive(Serialize, Deserialize)]
struct Entry {
    h: String,
    label: AgencyLabel,
    score: f64,
}

#[derive(Debug, Default)]
pub struct ClassificationCache {
    entries: RwLock<HashMap<ContentHash, Classification>>,
    pending: Mutex<Vec<(ContentHash, Classification)>>,
    file: Option<PathBuf>,
}

impl ClassificationCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or starts) the persistent cache for `identity` under `dir`.
    /// Unparseable lines, such as a torn final write, are ignored.
    pub fn persistent(dir: &Path, identity: &str) -> io::Result<Self> {
        let name = hex::encode(&Sha256::digest(identity.as_bytes())[..12]);
        let file = dir.join(format!("{name}.jsonl"));
        let mut entries = HashMap::new();
        match fs::File::open(&file) {
            Ok(f) => {
                for line in BufReader::new(f).lines() {
                    let line = line?;
                    let Ok(e) = serde_json::from_str::<Entry>(&line) else { continue };
                    let Ok(bytes) = hex::decode(&e.h) else { continue };
                    let Ok(hash) = ContentHash::try_from(bytes.as_slice()) else { continue };
                    entries.insert(hash, Classification::new(e.label, e.score));
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        Ok(ClassificationCache { entries: RwLock::new(entries), pending: Mutex::default(), file: Some(file) })
    }

    pub fn get(&self, hash: &ContentHash) -> Option<Classification> {
        self.entries.read().unwrap_or_else(|p| p.into_inner()).get(hash).copied()
    }

    pub fn insert(&self, hash: ContentHash, c: Classification) {
        let fresh = self.entries.write().unwrap_or_else(|p| p.into_inner()).insert(hash, c).is_none();
        if fresh && self.file.is_some() {
            self.pending.lock().unwrap_or_else(|p| p.into_inner()).push((hash, c));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|p| p.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends entries added since the last flush to the cache file.
    pub fn flush(&self) -> io::Result<()> {
        let Some(file) = &self.file else { return Ok(()) };
        let pending = std::mem::take(&mut *self.pending.lock().unwrap_or_else(|p| p.into_inner()));
        if pending.is_empty() {
            return Ok(());
        }
        if let Some(dir) = file.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut out = String::new();
        if ends_mid_line(file)? {
            out.push('\n');
        }
        for (h, c) in pending {
            let e = Entry { h: hex::encode(h), label: c.label, score: c.score };
            out.push_str(&serde_json::to_string(&e).expect("entry serializes"));
            out.push('\n');
        }
        let mut f = OpenOptions::new().create(true).append(true).open(file)?;
        f.write_all(out.as_bytes())
    }
}

fn ends_mid_line(file: &Path) -> io::Result<bool> {
    use std::io::{Read, Seek, SeekFrom};
    let mut f = match fs::File::open(file) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(false),
        Err(e) => return Err(e),
    };
    if f.metadata()?.len() == 0 {
        return Ok(false);
    }
    f.seek(SeekFrom::End(-1))?;
    let mut last = [0u8; 1];
    f.read_exact(&mut last)?;
    Ok(last[0] != b'\n')
}
