//! Detector configuration and catalog files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use tfsmell_core::catalog::{catalog, Catalog, CatalogEntry};
use tfsmell_core::detect::DetectorConfig;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Syntax { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| {
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        LoadError::Syntax { path: path.to_path_buf(), line: e.line(), column: e.column(), message }
    })
}

/// Defaults when `path` is `None`; otherwise the file's JSON object over
/// the defaults. Unknown keys are rejected.
pub fn load_config(path: Option<&Path>) -> Result<DetectorConfig, LoadError> {
    let Some(path) = path else { return Ok(DetectorConfig::default()) };
    let cfg: DetectorConfig = read_json(path)?;
    cfg.validate().map_err(|e| LoadError::Invalid { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(cfg)
}

/// The built-in catalog when `path` is `None`; otherwise a JSON array of
/// catalog entries.
pub fn load_catalog(path: Option<&Path>) -> Result<Catalog, LoadError> {
    let Some(path) = path else { return Ok(catalog()) };
    let entries: Vec<CatalogEntry> = read_json(path)?;
    Catalog::from_entries(entries).map_err(|e| LoadError::Invalid { path: path.to_path_buf(), message: e.to_string() })
}
