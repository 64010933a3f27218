//! Corpus scanning: walk a tree, parse and detect in parallel, merge.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tfsmell_core::detect::{self, sort_findings, DetectorConfig};
use tfsmell_core::hcl::{parse_with_id, ConfigFile};
use tfsmell_core::stats::{prevalence, CorpusStats, StatsError};
use tfsmell_core::{Engine, FileId, SmellFinding, SmellId};

use crate::pattern;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub scanned_files: u64,
    pub findings: Vec<SmellFinding>,
    /// Files that could not be read, were not UTF-8, or had syntax errors.
    pub parse_failures: u64,
    pub engine: Engine,
    /// sha256 of the detector configuration as JSON.
    pub config_digest: String,
    /// Paths with at least one finding and their smells.
    pub per_file_index: BTreeMap<String, BTreeSet<SmellId>>,
}

impl ScanReport {
    pub fn empty(engine: Engine, cfg: &DetectorConfig) -> ScanReport {
        ScanReport {
            scanned_files: 0,
            findings: Vec::new(),
            parse_failures: 0,
            engine,
            config_digest: config_digest(cfg),
            per_file_index: BTreeMap::new(),
        }
    }

    pub fn stats(&self) -> Result<CorpusStats, StatsError> {
        prevalence(self.scanned_files, &self.per_file_index)
    }
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub engine: Engine,
    /// Worker threads; 0 means one per CPU.
    pub jobs: usize,
    /// Shuffles the order files are processed in. The report does not
    /// depend on it.
    pub seed: Option<u64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { engine: Engine::Ast, jobs: 0, seed: None }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    #[error("cannot read {}: {source}", path.display())]
    Root { path: PathBuf, source: io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

pub fn config_digest(cfg: &DetectorConfig) -> String {
    let json = serde_json::to_vec(cfg).expect("config serializes");
    hex::encode(Sha256::digest(json))
}

/// Relative `/`-separated paths of every `.tf` file under `root`, sorted.
/// Symlinks are not followed. A `root` that is itself a file yields its
/// own name.
pub fn discover(root: &Path) -> Result<Vec<String>, ScanError> {
    let meta = fs::metadata(root).map_err(|source| ScanError::Root { path: root.to_path_buf(), source })?;
    if meta.is_file() {
        let name = root.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok(vec![name]);
    }
    fs::read_dir(root).map_err(|source| ScanError::Root { path: root.to_path_buf(), source })?;
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(root).follow_links(false).into_iter().filter_map(Result::ok) {
        if !entry.file_type().is_file() || entry.path().extension().is_none_or(|e| e != "tf") {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let parts: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
        out.push(parts.join("/"));
    }
    out.sort();
    Ok(out)
}

fn parent_dir(path: &str) -> &str {
    path.rsplit_once('/').map_or("", |(d, _)| d)
}

struct Loaded {
    path: String,
    text: Option<String>,
    parsed: Option<ConfigFile>,
}

impl Loaded {
    fn failed(&self) -> bool {
        self.parsed.as_ref().is_none_or(ConfigFile::has_errors)
    }
}

fn load(root: &Path, single_file: bool, id: usize, path: &str) -> Loaded {
    let full = if single_file { root.to_path_buf() } else { root.join(path) };
    let text = fs::read(&full).ok().and_then(|b| String::from_utf8(b).ok());
    // Pattern scans still parse, for the failure count.
    let parsed = text.as_deref().map(|t| parse_with_id(t, path, FileId(id as u32)));
    Loaded { path: path.to_string(), text, parsed }
}

fn detect(dir: &[&Loaded], engine: Engine, cfg: &DetectorConfig) -> Vec<SmellFinding> {
    match engine {
        Engine::Ast => {
            let files: Vec<ConfigFile> = dir.iter().filter_map(|l| l.parsed.clone()).collect();
            detect::detect_directory(&files, cfg)
        }
        Engine::Pattern => {
            let files: Vec<(&str, &str)> =
                dir.iter().filter_map(|l| l.text.as_deref().map(|t| (l.path.as_str(), t))).collect();
            pattern::detect_directory(&files, cfg)
        }
    }
}

/// Scans every `.tf` file under `root`.
pub fn scan(root: &Path, cfg: &DetectorConfig, opts: &ScanOptions) -> Result<ScanReport, ScanError> {
    let paths = discover(root)?;
    let single_file = root.is_file();
    let mut order: Vec<usize> = (0..paths.len()).collect();
    if let Some(seed) = opts.seed {
        tfsmell_core::sample::shuffle(&mut order, seed);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().map_err(|e| ScanError::Pool(e.to_string()))?;

    let (loaded, mut findings) = pool.install(|| {
        let mut loaded: Vec<Loaded> =
            order.par_iter().map(|&i| load(root, single_file, i, &paths[i])).collect();
        loaded.sort_by(|a, b| a.path.cmp(&b.path));
        let mut dirs: BTreeMap<&str, Vec<&Loaded>> = BTreeMap::new();
        for l in &loaded {
            dirs.entry(parent_dir(&l.path)).or_default().push(l);
        }
        let dirs: Vec<Vec<&Loaded>> = dirs.into_values().collect();
        let findings: Vec<SmellFinding> =
            dirs.par_iter().flat_map_iter(|d| detect(d, opts.engine, cfg)).collect();
        (loaded, findings)
    });

    sort_findings(&mut findings);
    let mut per_file_index: BTreeMap<String, BTreeSet<SmellId>> = BTreeMap::new();
    for f in &findings {
        per_file_index.entry(f.path.clone()).or_default().insert(f.smell);
    }
    Ok(ScanReport {
        scanned_files: loaded.len() as u64,
        parse_failures: loaded.iter().filter(|l| l.failed()).count() as u64,
        findings,
        engine: opts.engine,
        config_digest: config_digest(cfg),
        per_file_index,
    })
}

/// Keeps only findings for smells in `ids` and rebuilds the index.
pub fn restrict(report: &mut ScanReport, ids: &[SmellId]) {
    report.findings.retain(|f| ids.contains(&f.smell));
    for smells in report.per_file_index.values_mut() {
        smells.retain(|s| ids.contains(s));
    }
    report.per_file_index.retain(|_, s| !s.is_empty());
}
