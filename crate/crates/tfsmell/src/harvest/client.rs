use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Deserialize;
use ureq::http::Response;
use ureq::Body;

use super::{Provider, RepoRecord, Visibility};

pub const DEFAULT_API_URL: &str = "https://api.github.com";
/// Environment variable read for the API token.
pub const TOKEN_ENV: &str = "TFSMELL_GITHUB_TOKEN";

const PER_PAGE: u32 = 100;
/// The search API returns at most this many results per query.
const SEARCH_CAP: u64 = 1000;
const BODY_LIMIT: u64 = 64 * 1024 * 1024;

/// Time source, injectable so backoff can be tested without waiting.
pub trait Clock: Send + Sync {
    /// Seconds since the Unix epoch.
    fn now(&self) -> u64;
    fn sleep(&self, d: Duration);
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarvestError {
    #[error("authentication failed for {0} (set {TOKEN_ENV})")]
    Auth(String),
    #[error("rate limit still exceeded after {0} retries")]
    RateBudgetExhausted(u32),
    #[error("network error: {0}")]
    Network(String),
    #[error("HTTP {status} from {url}")]
    Status { status: u16, url: String },
    #[error("search results for `{query}` are incomplete (page {page}); retry later")]
    IncompleteResults { query: String, page: u32 },
    #[error("query `{query}` matches {total} results, more than the {SEARCH_CAP} the search API returns; narrow it")]
    SearchCapped { query: String, total: u64 },
    #[error("unexpected response from {url}: {message}")]
    Decode { url: String, message: String },
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

pub(crate) struct Reply {
    pub status: u16,
    pub body: Vec<u8>,
}

pub struct GitHubClient {
    agent: ureq::Agent,
    base_url: String,
    token: Option<String>,
    max_retries: u32,
    clock: Box<dyn Clock>,
    /// No request starts before this time; shared by all fetch threads.
    resume_at: Mutex<u64>,
}

#[derive(Deserialize)]
struct SearchPage {
    total_count: u64,
    incomplete_results: bool,
    items: Vec<SearchItem>,
}

#[derive(Deserialize)]
struct SearchItem {
    repository: RepoRef,
}

#[derive(Deserialize)]
struct RepoRef {
    full_name: String,
}

#[derive(Deserialize)]
struct RepoMeta {
    full_name: String,
    stargazers_count: u64,
    fork: bool,
    size: u64,
    #[serde(default)]
    private: bool,
    #[serde(default)]
    visibility: Option<String>,
}

/// Repositories found by a search, with metadata.
#[derive(Debug, Default)]
pub struct SearchOutcome {
    pub records: Vec<RepoRecord>,
    /// Names returned by the search whose metadata lookup gave 404.
    pub gone: Vec<String>,
}

impl GitHubClient {
    pub fn new(base_url: &str, token: Option<String>) -> GitHubClient {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(60)))
            .user_agent(concat!("tfsmell/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        GitHubClient {
            agent,
            base_url: base_url.trim_end_matches('/').to_string(),
            token,
            max_retries: 5,
            clock: Box::new(SystemClock),
            resume_at: Mutex::new(0),
        }
    }

    pub fn with_clock(mut self, clock: Box<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_max_retries(mut self, n: u32) -> Self {
        self.max_retries = n;
        self
    }

    pub fn timestamp(&self) -> String {
        chrono::DateTime::from_timestamp(self.clock.now() as i64, 0)
            .unwrap_or_default()
            .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    }

    fn wait_for_budget(&self) {
        loop {
            let until = *self.resume_at.lock().unwrap();
            let now = self.clock.now();
            if until <= now {
                return;
            }
            self.clock.sleep(Duration::from_secs(until - now));
        }
    }

    /// Seconds to wait before retrying, or `None` when the response is not
    /// a rate-limit signal.
    fn backoff(&self, resp: &Response<Body>) -> Option<u64> {
        let status = resp.status().as_u16();
        if status != 403 && status != 429 {
            return None;
        }
        let header = |name: &str| resp.headers().get(name).and_then(|v| v.to_str().ok()).map(str::trim);
        if let Some(secs) = header("retry-after").and_then(|v| v.parse::<u64>().ok()) {
            return Some(secs.max(1));
        }
        if header("x-ratelimit-remaining") == Some("0") {
            let reset = header("x-ratelimit-reset").and_then(|v| v.parse::<u64>().ok()).unwrap_or(0);
            return Some(reset.saturating_sub(self.clock.now()).max(1));
        }
        (status == 429).then_some(60)
    }

    pub(crate) fn get(&self, path: &str, query: &[(&str, String)], accept: &str) -> Result<Reply, HarvestError> {
        let url = format!("{}{}", self.base_url, path);
        for attempt in 0..=self.max_retries {
            self.wait_for_budget();
            let mut req = self.agent.get(&url).header("Accept", accept).header("X-GitHub-Api-Version", "2022-11-28");
            for (k, v) in query {
                req = req.query(*k, v);
            }
            if let Some(t) = &self.token {
                req = req.header("Authorization", &format!("Bearer {t}"));
            }
            let mut resp = req.call().map_err(|e| HarvestError::Network(e.to_string()))?;
            let status = resp.status().as_u16();
            if status == 401 {
                return Err(HarvestError::Auth(url));
            }
            if let Some(wait) = self.backoff(&resp) {
                if attempt == self.max_retries {
                    break;
                }
                let mut resume = self.resume_at.lock().unwrap();
                *resume = (*resume).max(self.clock.now() + wait);
                continue;
            }
            let body = resp
                .body_mut()
                .with_config()
                .limit(BODY_LIMIT)
                .read_to_vec()
                .map_err(|e| HarvestError::Network(e.to_string()))?;
            return Ok(Reply { status, body });
        }
        Err(HarvestError::RateBudgetExhausted(self.max_retries))
    }

    pub(crate) fn get_json<T: serde::de::DeserializeOwned>(
        &self,
        path: &str,
        query: &[(&str, String)],
    ) -> Result<Option<T>, HarvestError> {
        let reply = self.get(path, query, "application/vnd.github+json")?;
        match reply.status {
            200 => serde_json::from_slice(&reply.body)
                .map(Some)
                .map_err(|e| HarvestError::Decode { url: path.to_string(), message: e.to_string() }),
            404 => Ok(None),
            status => Err(HarvestError::Status { status, url: path.to_string() }),
        }
    }

    /// Repository names matching a code search, deduplicated, in the
    /// order first seen. Every page is read; incomplete results are an
    /// error rather than a short list.
    pub fn search_code(&self, query: &str) -> Result<Vec<String>, HarvestError> {
        let mut names: Vec<String> = Vec::new();
        let mut seen_items = 0u64;
        for page in 1.. {
            let params = [("q", query.to_string()), ("per_page", PER_PAGE.to_string()), ("page", page.to_string())];
            let result: SearchPage = self
                .get_json("/search/code", &params)?
                .ok_or_else(|| HarvestError::Status { status: 404, url: "/search/code".into() })?;
            if result.incomplete_results {
                return Err(HarvestError::IncompleteResults { query: query.to_string(), page });
            }
            if result.total_count > SEARCH_CAP {
                return Err(HarvestError::SearchCapped { query: query.to_string(), total: result.total_count });
            }
            seen_items += result.items.len() as u64;
            let short = (result.items.len() as u32) < PER_PAGE;
            for item in result.items {
                if !names.contains(&item.repository.full_name) {
                    names.push(item.repository.full_name);
                }
            }
            if short || seen_items >= result.total_count {
                break;
            }
        }
        Ok(names)
    }

    /// Metadata for one repository; `None` when it no longer exists.
    pub fn repo(&self, full_name: &str, provider: Provider) -> Result<Option<RepoRecord>, HarvestError> {
        let Some(meta) = self.get_json::<RepoMeta>(&format!("/repos/{full_name}"), &[])? else { return Ok(None) };
        let public = match meta.visibility.as_deref() {
            Some(v) => v == "public",
            None => !meta.private,
        };
        Ok(Some(RepoRecord {
            full_name: meta.full_name,
            stars: meta.stargazers_count,
            is_fork: meta.fork,
            size_kb: meta.size,
            visibility: if public { Visibility::Public } else { Visibility::Other },
            provider_tag: provider,
            retrieved_at: self.timestamp(),
        }))
    }

    /// Runs every query, merges the repository names and looks each one up.
    pub fn search_repos(&self, provider: Provider, queries: &[String]) -> Result<SearchOutcome, HarvestError> {
        let mut names: Vec<String> = Vec::new();
        for q in queries {
            for n in self.search_code(q)? {
                if !names.contains(&n) {
                    names.push(n);
                }
            }
        }
        let mut out = SearchOutcome::default();
        for n in names {
            match self.repo(&n, provider)? {
                Some(r) if !out.records.iter().any(|o| o.full_name == r.full_name) => out.records.push(r),
                Some(_) => {}
                None => out.gone.push(n),
            }
        }
        Ok(out)
    }
}
