//! Repository discovery, filtering and `.tf` download.
//!
//! The client speaks the GitHub REST API (code search, repository
//! metadata, git trees and raw contents) against a configurable base URL,
//! so tests run against a local stub.

mod client;
mod fetch;
mod manifest;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use client::{Clock, GitHubClient, HarvestError, SearchOutcome, SystemClock, DEFAULT_API_URL, TOKEN_ENV};
pub use fetch::{fetch_all, fetch_tf_files, FetchOutcome};
pub use manifest::{Decision, ManifestIndex, ManifestRecord, ManifestWriter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    Aws,
    Azure,
    Gcp,
}

impl Provider {
    pub fn as_str(self) -> &'static str {
        match self {
            Provider::Aws => "aws",
            Provider::Azure => "azure",
            Provider::Gcp => "gcp",
        }
    }

    /// Search queries used when none are configured.
    pub fn default_queries(self) -> Vec<String> {
        let token = match self {
            Provider::Aws => "aws_instance",
            Provider::Azure => "azurerm_",
            Provider::Gcp => "google_compute_",
        };
        vec![format!("{token} language:HCL")]
    }
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provider {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "aws" => Ok(Provider::Aws),
            "azure" => Ok(Provider::Azure),
            "gcp" => Ok(Provider::Gcp),
            other => Err(format!("unknown provider `{other}` (expected aws, azure or gcp)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoRecord {
    pub full_name: String,
    pub stars: u64,
    pub is_fork: bool,
    pub size_kb: u64,
    pub visibility: Visibility,
    pub provider_tag: Provider,
    /// RFC 3339, UTC.
    pub retrieved_at: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterCriteria {
    pub min_stars: u64,
    pub exclude_forks: bool,
    pub min_size_kb_exclusive: u64,
    pub require_public: bool,
    /// Kept repositories are flagged for a manual content review; nothing
    /// is rejected on content automatically.
    pub manual_review_content: bool,
    /// Search queries; empty means the provider defaults.
    pub queries: Vec<String>,
}

impl Default for FilterCriteria {
    fn default() -> Self {
        FilterCriteria {
            min_stars: 2,
            exclude_forks: true,
            min_size_kb_exclusive: 0,
            require_public: true,
            manual_review_content: true,
            queries: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kept {
    pub record: RepoRecord,
    pub manual_review: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejected {
    pub record: RepoRecord,
    /// `size`, `fork`, `min_stars` or `visibility`: the first criterion
    /// the record fails.
    pub reason: String,
}

/// First failing criterion, checked in the order size, fork, stars,
/// visibility.
pub fn first_failure(r: &RepoRecord, c: &FilterCriteria) -> Option<&'static str> {
    if r.size_kb <= c.min_size_kb_exclusive {
        Some("size")
    } else if c.exclude_forks && r.is_fork {
        Some("fork")
    } else if r.stars < c.min_stars {
        Some("min_stars")
    } else if c.require_public && r.visibility != Visibility::Public {
        Some("visibility")
    } else {
        None
    }
}

pub fn apply_filters(records: &[RepoRecord], criteria: &FilterCriteria) -> (Vec<Kept>, Vec<Rejected>) {
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for r in records {
        match first_failure(r, criteria) {
            None => kept.push(Kept { record: r.clone(), manual_review: criteria.manual_review_content }),
            Some(reason) => rejected.push(Rejected { record: r.clone(), reason: reason.to_string() }),
        }
    }
    (kept, rejected)
}

pub struct HarvestOptions {
    pub provider: Provider,
    pub criteria: FilterCriteria,
    pub dest: PathBuf,
    pub dry_run: bool,
    pub jobs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarvestSummary {
    pub found: u64,
    pub kept: u64,
    pub rejected: BTreeMap<String, u64>,
    pub downloaded: u64,
    pub digest_matches: u64,
    pub skipped: u64,
}

/// Search, filter and (unless dry-running) download, recording every
/// decision in `manifest`.
pub fn harvest(
    client: &GitHubClient,
    opts: &HarvestOptions,
    index: &ManifestIndex,
    manifest: &ManifestWriter,
) -> Result<HarvestSummary, HarvestError> {
    let queries = if opts.criteria.queries.is_empty() { opts.provider.default_queries() } else { opts.criteria.queries.clone() };
    manifest.write(ManifestRecord::Criteria {
        provider: opts.provider,
        queries: queries.clone(),
        criteria: opts.criteria.clone(),
        at: client.timestamp(),
    });
    let found = client.search_repos(opts.provider, &queries)?;
    let mut summary = HarvestSummary { found: found.records.len() as u64, ..HarvestSummary::default() };
    for name in &found.gone {
        manifest.write(ManifestRecord::Skip { full_name: name.clone(), reason: "gone".into() });
        summary.skipped += 1;
    }
    let (kept, rejected) = apply_filters(&found.records, &opts.criteria);
    for r in &rejected {
        *summary.rejected.entry(r.reason.clone()).or_default() += 1;
        manifest.write(ManifestRecord::Repo {
            record: r.record.clone(),
            decision: Decision::Exclude,
            reason: r.reason.clone(),
            manual_review: false,
        });
    }
    for k in &kept {
        manifest.write(ManifestRecord::Repo {
            record: k.record.clone(),
            decision: Decision::Include,
            reason: "passed".into(),
            manual_review: k.manual_review,
        });
    }
    summary.kept = kept.len() as u64;
    if !opts.dry_run {
        let records: Vec<RepoRecord> = kept.into_iter().map(|k| k.record).collect();
        for outcome in fetch_all(client, &records, &opts.dest, index, manifest, opts.jobs) {
            summary.downloaded += outcome.downloaded;
            summary.digest_matches += outcome.digest_matches;
            summary.skipped += outcome.skipped.is_some() as u64;
        }
    }
    manifest.write(ManifestRecord::Totals { provider: opts.provider, summary: summary.clone() });
    Ok(summary)
}
