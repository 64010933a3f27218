use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::mpsc::{channel, Sender};
use std::sync::Mutex;
use std::thread::JoinHandle;

use serde::{Deserialize, Serialize};

use super::{FilterCriteria, HarvestSummary, Provider, RepoRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Include,
    Exclude,
}

/// One line of the manifest. Lines are only ever appended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ManifestRecord {
    Criteria { provider: Provider, queries: Vec<String>, criteria: FilterCriteria, at: String },
    Repo { record: RepoRecord, decision: Decision, reason: String, manual_review: bool },
    File { full_name: String, path: String, blob_sha: String, sha256: String, bytes: u64 },
    Skip { full_name: String, reason: String },
    Totals { provider: Provider, summary: HarvestSummary },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileState {
    pub blob_sha: String,
    pub sha256: String,
}

/// What earlier runs recorded: the latest file record per repository path.
#[derive(Debug, Clone, Default)]
pub struct ManifestIndex {
    pub files: BTreeMap<(String, String), FileState>,
}

impl ManifestIndex {
    /// An empty index when `path` does not exist.
    pub fn load(path: &Path) -> io::Result<ManifestIndex> {
        let mut index = ManifestIndex::default();
        let file = match fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(index),
            Err(e) => return Err(e),
        };
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ManifestRecord = serde_json::from_str(&line).map_err(|e| {
                io::Error::new(io::ErrorKind::InvalidData, format!("{}:{}: {e}", path.display(), n + 1))
            })?;
            if let ManifestRecord::File { full_name, path, blob_sha, sha256, .. } = record {
                index.files.insert((full_name, path), FileState { blob_sha, sha256 });
            }
        }
        Ok(index)
    }

    /// Repository name to recorded `.tf` paths, for the sampler.
    pub fn repo_files(&self) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (repo, path) in self.files.keys() {
            out.entry(repo.clone()).or_default().push(path.clone());
        }
        out
    }
}

/// Serializes records from any number of threads through one writer thread.
pub struct ManifestWriter {
    tx: Mutex<Option<Sender<ManifestRecord>>>,
    handle: Option<JoinHandle<io::Result<()>>>,
}

impl ManifestWriter {
    pub fn new(mut out: Box<dyn Write + Send>) -> ManifestWriter {
        let (tx, rx) = channel::<ManifestRecord>();
        let handle = std::thread::spawn(move || {
            for record in rx {
                let line = serde_json::to_string(&record).map_err(io::Error::other)?;
                writeln!(out, "{line}")?;
                out.flush()?;
            }
            Ok(())
        });
        ManifestWriter { tx: Mutex::new(Some(tx)), handle: Some(handle) }
    }

    /// Appends to the file at `path`, creating it and its parent directory.
    pub fn append(path: &Path) -> io::Result<ManifestWriter> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(ManifestWriter::new(Box::new(file)))
    }

    pub fn write(&self, record: ManifestRecord) {
        if let Some(tx) = self.tx.lock().unwrap().as_ref() {
            // A send only fails after the writer thread hit an IO error,
            // which finish() reports.
            let _ = tx.send(record);
        }
    }

    /// Flushes and reports the first write error, if any.
    pub fn finish(mut self) -> io::Result<()> {
        self.tx.lock().unwrap().take();
        match self.handle.take() {
            Some(h) => h.join().map_err(|_| io::Error::other("manifest writer panicked"))?,
            None => Ok(()),
        }
    }
}

impl Drop for ManifestWriter {
    fn drop(&mut self) {
        self.tx.lock().unwrap().take();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}
