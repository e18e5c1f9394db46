use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("inbox store: {0}")]
pub struct StoreIoError(pub String);

impl From<std::io::Error> for StoreIoError {
    fn from(e: std::io::Error) -> Self {
        StoreIoError(e.to_string())
    }
}

impl From<serde_json::Error> for StoreIoError {
    fn from(e: serde_json::Error) -> Self {
        StoreIoError(e.to_string())
    }
}

/// A received message, still sealed. Field order is the on-disk order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InboxEntry {
    pub from: String,
    pub envelope: String,
    pub received_at: u64,
    pub read: bool,
}

/// Per-handset message log. Entries keep arrival order; only the `read`
/// flag of an existing entry may change.
pub trait InboxStore: Send {
    fn append(&mut self, address: &str, entry: &InboxEntry) -> Result<(), StoreIoError>;
    fn load(&self, address: &str) -> Result<Vec<InboxEntry>, StoreIoError>;
    /// Marks the entry at zero-based `index` as read.
    fn mark_read(&mut self, address: &str, index: usize) -> Result<(), StoreIoError>;
}

#[derive(Debug, Default)]
pub struct MemoryInboxStore {
    inboxes: HashMap<String, Vec<InboxEntry>>,
}

impl MemoryInboxStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl InboxStore for MemoryInboxStore {
    fn append(&mut self, address: &str, entry: &InboxEntry) -> Result<(), StoreIoError> {
        self.inboxes
            .entry(address.to_string())
            .or_default()
            .push(entry.clone());
        Ok(())
    }

    fn load(&self, address: &str) -> Result<Vec<InboxEntry>, StoreIoError> {
        Ok(self.inboxes.get(address).cloned().unwrap_or_default())
    }

    fn mark_read(&mut self, address: &str, index: usize) -> Result<(), StoreIoError> {
        self.inboxes
            .get_mut(address)
            .and_then(|v| v.get_mut(index))
            .map(|e| e.read = true)
            .ok_or_else(|| StoreIoError(format!("no entry {index} for {address}")))
    }
}

/// One `<address>.jsonl` file per handset, one JSON object per line.
#[derive(Debug, Clone)]
pub struct FileInboxStore {
    dir: PathBuf,
}

impl FileInboxStore {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreIoError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(FileInboxStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, address: &str) -> Result<PathBuf, StoreIoError> {
        if address.is_empty() || !address.bytes().all(|b| b.is_ascii_alphanumeric()) {
            return Err(StoreIoError(format!("invalid address {address:?}")));
        }
        Ok(self.dir.join(format!("{address}.jsonl")))
    }

    fn encode_line(entry: &InboxEntry) -> Result<String, StoreIoError> {
        let mut line = serde_json::to_string(entry)?;
        line.push('\n');
        Ok(line)
    }
}

impl InboxStore for FileInboxStore {
    fn append(&mut self, address: &str, entry: &InboxEntry) -> Result<(), StoreIoError> {
        let path = self.path_for(address)?;
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        file.write_all(Self::encode_line(entry)?.as_bytes())?;
        file.sync_data()?;
        Ok(())
    }

    fn load(&self, address: &str) -> Result<Vec<InboxEntry>, StoreIoError> {
        let path = self.path_for(address)?;
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        BufReader::new(file)
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.is_empty()))
            .map(|line| Ok(serde_json::from_str(&line?)?))
            .collect()
    }

    fn mark_read(&mut self, address: &str, index: usize) -> Result<(), StoreIoError> {
        let mut entries = self.load(address)?;
        let entry = entries
            .get_mut(index)
            .ok_or_else(|| StoreIoError(format!("no entry {index} for {address}")))?;
        if entry.read {
            return Ok(());
        }
        entry.read = true;
        // Rewrite through a temp file so a crash leaves either the old or new log.
        let path = self.path_for(address)?;
        let tmp = path.with_extension("jsonl.tmp");
        {
            let mut file = File::create(&tmp)?;
            for e in &entries {
                file.write_all(Self::encode_line(e)?.as_bytes())?;
            }
            file.sync_data()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }
}
