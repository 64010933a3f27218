use std::fs;
use std::path::{Component, Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::client::{GitHubClient, HarvestError};
use super::manifest::{ManifestIndex, ManifestRecord, ManifestWriter};
use super::RepoRecord;

const PATH_SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

#[derive(Deserialize)]
struct Tree {
    #[serde(default)]
    tree: Vec<TreeEntry>,
    #[serde(default)]
    truncated: bool,
}

#[derive(Deserialize)]
struct TreeEntry {
    path: String,
    #[serde(rename = "type")]
    kind: String,
    sha: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FetchOutcome {
    pub full_name: String,
    /// Repository-relative paths of the `.tf` files now on disk.
    pub files: Vec<String>,
    pub downloaded: u64,
    pub digest_matches: u64,
    /// Why the repository was abandoned, if it was.
    pub skipped: Option<String>,
    /// Set when the tree listing was truncated by the server.
    pub truncated: bool,
}

fn safe_name(full_name: &str) -> bool {
    let parts: Vec<&str> = full_name.split('/').collect();
    parts.len() == 2
        && parts.iter().all(|p| {
            !p.is_empty() && *p != "." && *p != ".." && p.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
        })
}

fn safe_relative(path: &str) -> Option<PathBuf> {
    let p = Path::new(path);
    p.components().all(|c| matches!(c, Component::Normal(_))).then(|| p.to_path_buf())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn encode_path(path: &str) -> String {
    path.split('/').map(|s| utf8_percent_encode(s, PATH_SEGMENT).to_string()).collect::<Vec<_>>().join("/")
}

fn skip(manifest: &ManifestWriter, mut out: FetchOutcome, reason: &str) -> FetchOutcome {
    manifest.write(ManifestRecord::Skip { full_name: out.full_name.clone(), reason: reason.to_string() });
    out.skipped = Some(reason.to_string());
    out
}

fn unavailable(status: u16) -> &'static str {
    match status {
        404 => "gone",
        409 => "empty",
        _ => "unavailable",
    }
}

/// Downloads every `.tf` blob of the repository's default branch to
/// `dest/<owner>/<name>/<path>`. Files whose blob and local digest match
/// the manifest are not downloaded again. A missing or inaccessible
/// repository is recorded as a skip and is not an error.
pub fn fetch_tf_files(
    client: &GitHubClient,
    record: &RepoRecord,
    dest: &Path,
    index: &ManifestIndex,
    manifest: &ManifestWriter,
) -> Result<FetchOutcome, HarvestError> {
    let name = &record.full_name;
    let out = FetchOutcome { full_name: name.clone(), ..FetchOutcome::default() };
    if !safe_name(name) {
        return Ok(skip(manifest, out, "unsafe_name"));
    }
    let tree_path = format!("/repos/{name}/git/trees/HEAD");
    let reply = client.get(&tree_path, &[("recursive", "1".to_string())], "application/vnd.github+json")?;
    if reply.status != 200 {
        return Ok(skip(manifest, out, unavailable(reply.status)));
    }
    let tree: Tree = serde_json::from_slice(&reply.body)
        .map_err(|e| HarvestError::Decode { url: tree_path.clone(), message: e.to_string() })?;
    let mut out = FetchOutcome { truncated: tree.truncated, ..out };
    let root = dest.join(name);
    for entry in tree.tree.iter().filter(|e| e.kind == "blob" && e.path.ends_with(".tf")) {
        let Some(rel) = safe_relative(&entry.path) else {
            manifest.write(ManifestRecord::Skip { full_name: format!("{name}/{}", entry.path), reason: "unsafe_path".into() });
            continue;
        };
        let local = root.join(&rel);
        let key = (name.clone(), entry.path.clone());
        if let Some(prev) = index.files.get(&key) {
            if prev.blob_sha == entry.sha && fs::read(&local).is_ok_and(|b| sha256_hex(&b) == prev.sha256) {
                out.digest_matches += 1;
                out.files.push(entry.path.clone());
                continue;
            }
        }
        let reply = client.get(
            &format!("/repos/{name}/contents/{}", encode_path(&entry.path)),
            &[],
            "application/vnd.github.raw+json",
        )?;
        if reply.status != 200 {
            return Ok(skip(manifest, out, unavailable(reply.status)));
        }
        let io_err = |source| HarvestError::Io { path: local.clone(), source };
        if let Some(dir) = local.parent() {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        fs::write(&local, &reply.body).map_err(io_err)?;
        manifest.write(ManifestRecord::File {
            full_name: name.clone(),
            path: entry.path.clone(),
            blob_sha: entry.sha.clone(),
            sha256: sha256_hex(&reply.body),
            bytes: reply.body.len() as u64,
        });
        out.downloaded += 1;
        out.files.push(entry.path.clone());
    }
    Ok(out)
}

/// Fetches `records` on up to `jobs` threads. A repository whose fetch
/// fails with an error is recorded as skipped with the error text; the
/// batch always completes. Outcomes come back in input order.
pub fn fetch_all(
    client: &GitHubClient,
    records: &[RepoRecord],
    dest: &Path,
    index: &ManifestIndex,
    manifest: &ManifestWriter,
    jobs: usize,
) -> Vec<FetchOutcome> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<FetchOutcome>>> = Mutex::new(vec![None; records.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, records.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(r) = records.get(i) else { break };
                let outcome = fetch_tf_files(client, r, dest, index, manifest).unwrap_or_else(|e| {
                    let out = FetchOutcome { full_name: r.full_name.clone(), ..FetchOutcome::default() };
                    skip(manifest, out, &format!("error: {e}"))
                });
                results.lock().unwrap()[i] = Some(outcome);
            });
        }
    });
    results.into_inner().unwrap().into_iter().map(|o| o.expect("every record fetched")).collect()
}
