//! Text-pattern detectors.
//!
//! These work line by line on the raw file text with regular expressions
//! and never look at the syntax tree, so they also run on files that fail
//! to parse. A resource "chunk" runs from a `resource` header to the next
//! top-level keyword at column 1 (or the end of the file).
//!
//! | smell | pattern |
//! |-------|---------|
//! | SS1 | `vm_size`, `instance_type` or `machine_type` `= "<size>"` inside a resource chunk, size listed for the provider, no autoscaler header in the file |
//! | SS2 | `count = <digits>` inside a compute-type chunk, at or above the minimum, no autoscaler header in the file |
//! | SS3 | a chunk of a lifecycle-required type with no `lifecycle {` line |
//! | SS4 | `<retention attr> = <digits>` above the limit in a log-group chunk, or no such line |
//! | SS5 | two or more distinct region classes among `region`/`location`/`zone`/`availability_zone` string assignments (and comment text when enabled) |
//! | SS6 | per directory: no `backend "<not local>"` and no `cloud {` line; reported on `terraform {` files |
//! | SS7 | count of `resource "…" "…"` headers at or above the limit |

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use tfsmell_core::detect::{region_class, sort_findings, DetectorConfig, SuppressionScope};
use tfsmell_core::span::{FileId, LineIndex};
use tfsmell_core::{Engine, SmellFinding, SmellId, SourceSpan};

fn re(pattern: &str) -> Regex {
    Regex::new(pattern).expect("static pattern")
}

static RESOURCE: LazyLock<Regex> = LazyLock::new(|| re(r#"(?m)^[ \t]*resource[ \t]+"([A-Za-z0-9_-]+)"[ \t]+"([^"\n]*)""#));
static TOP_LEVEL: LazyLock<Regex> = LazyLock::new(|| {
    re(r"(?m)^(resource|data|variable|output|locals|module|provider|terraform|moved|import|check|removed)\b")
});
static STRING_ATTR: LazyLock<Regex> =
    LazyLock::new(|| re(r#"(?m)^[ \t]*(([A-Za-z_][A-Za-z0-9_-]*)[ \t]*=[ \t]*"([^"\n]*)")"#));
static NUMBER_ATTR: LazyLock<Regex> =
    LazyLock::new(|| re(r"(?m)^[ \t]*(([A-Za-z_][A-Za-z0-9_-]*)[ \t]*=[ \t]*([0-9]+))\b"));
static LIFECYCLE: LazyLock<Regex> = LazyLock::new(|| re(r"(?m)^[ \t]*lifecycle[ \t]*\{"));
static TERRAFORM: LazyLock<Regex> = LazyLock::new(|| re(r"(?m)^[ \t]*terraform[ \t]*\{"));
static BACKEND: LazyLock<Regex> = LazyLock::new(|| re(r#"(?m)^[ \t]*backend[ \t]+"([^"\n]*)""#));
static CLOUD: LazyLock<Regex> = LazyLock::new(|| re(r"(?m)^[ \t]*cloud[ \t]*\{"));
static COMMENT: LazyLock<Regex> = LazyLock::new(|| re(r"(?m)(?:#|//)([^\n]*)"));
static REGION_WORD: LazyLock<Regex> =
    LazyLock::new(|| re(r"\b([a-z]{2,}(?:-[a-z]+)+-?[0-9]+[a-z]?(?:-[a-z])?)\b"));

struct Chunk<'t> {
    rtype: &'t str,
    name: &'t str,
    start: usize,
    end: usize,
    body: &'t str,
}

fn chunks(text: &str) -> Vec<Chunk<'_>> {
    let heads: Vec<_> = RESOURCE.captures_iter(text).collect();
    heads
        .iter()
        .map(|c| {
            let m = c.get(0).unwrap();
            let start = m.start() + (m.as_str().len() - m.as_str().trim_start().len());
            let limit = TOP_LEVEL
                .find_iter(text)
                .map(|t| t.start())
                .find(|&s| s > m.start())
                .unwrap_or(text.len());
            let end = start + text[start..limit].trim_end().len();
            Chunk { rtype: c.get(1).unwrap().as_str(), name: c.get(2).unwrap().as_str(), start, end, body: &text[start..end] }
        })
        .collect()
}

struct Ctx<'t> {
    path: &'t str,
    lines: LineIndex<'t>,
}

impl Ctx<'_> {
    fn finding(&self, smell: SmellId, span: SourceSpan, evidence: String, message: String) -> SmellFinding {
        SmellFinding { smell, path: self.path.to_string(), span, evidence, engine: Engine::Pattern, message }
    }
}

fn has_autoscaler(text: &str, cfg: &DetectorConfig) -> bool {
    RESOURCE.captures_iter(text).any(|c| cfg.ss2_autoscaler_types.contains(&c[1]))
}

/// Pattern findings for one file, SS6 excluded.
pub fn detect_file(path: &str, text: &str, cfg: &DetectorConfig) -> Vec<SmellFinding> {
    file_findings(path, text, cfg, has_autoscaler(text, cfg))
}

fn file_findings(path: &str, text: &str, cfg: &DetectorConfig, suppressed: bool) -> Vec<SmellFinding> {
    let ctx = Ctx { path, lines: LineIndex::new(text, FileId(0)) };
    let mut out = Vec::new();
    let chunks = chunks(text);
    for c in &chunks {
        let address = format!("{}.{}", c.rtype, c.name);
        if !suppressed {
            for m in STRING_ATTR.captures_iter(c.body) {
                let (name, value) = (&m[2], &m[3]);
                if tfsmell_core::detect::SS1_SIZE_ATTRS.contains(&name) && cfg.is_large_size(c.rtype, value) {
                    let g = m.get(1).unwrap();
                    out.push(ctx.finding(
                        SmellId::SS1,
                        ctx.lines.span(c.start + g.start(), c.start + g.end()),
                        value.to_string(),
                        format!("{address} uses oversized {name} `{value}`"),
                    ));
                    break;
                }
            }
            if cfg.ss2_compute_types.contains(c.rtype) {
                if let Some(m) = NUMBER_ATTR.captures_iter(c.body).find(|m| &m[2] == "count") {
                    if m[3].parse::<u64>().is_ok_and(|n| n >= cfg.ss2_fixed_count_min) {
                        let g = m.get(1).unwrap();
                        out.push(ctx.finding(
                            SmellId::SS2,
                            ctx.lines.span(c.start + g.start(), c.start + g.end()),
                            format!("count={}", &m[3]),
                            format!("{address} has a fixed count of {} and no autoscaling resource", &m[3]),
                        ));
                    }
                }
            }
        }
        if cfg.ss3_lifecycle_required_types.contains(c.rtype) && !LIFECYCLE.is_match(c.body) {
            out.push(ctx.finding(
                SmellId::SS3,
                ctx.lines.span(c.start, c.end),
                c.rtype.to_string(),
                format!("{address} has no lifecycle block"),
            ));
        }
        if let Some(attr) = cfg.ss4_log_group_types.get(c.rtype) {
            match NUMBER_ATTR.captures_iter(c.body).find(|m| &m[2] == attr.as_str()) {
                Some(m) => {
                    if m[3].parse::<u64>().map_or(true, |d| d > cfg.ss4_retention_max_days) {
                        let g = m.get(1).unwrap();
                        out.push(ctx.finding(
                            SmellId::SS4,
                            ctx.lines.span(c.start + g.start(), c.start + g.end()),
                            m[3].to_string(),
                            format!("{address} retains logs for {} days (limit {})", &m[3], cfg.ss4_retention_max_days),
                        ));
                    }
                }
                None if cfg.ss4_flag_missing_retention && !c.body.contains(attr.as_str()) => out.push(ctx.finding(
                    SmellId::SS4,
                    ctx.lines.span(c.start, c.end),
                    "unset".to_string(),
                    format!("{address} sets no `{attr}`, so logs are kept indefinitely"),
                )),
                None => {}
            }
        }
    }

    let mut regions: BTreeSet<String> = STRING_ATTR
        .captures_iter(text)
        .filter(|m| cfg.ss5_region_attrs.iter().any(|a| a == &m[2]))
        .filter_map(|m| region_class(&m[2], &m[3]))
        .collect();
    if cfg.ss5_scan_comments {
        for c in COMMENT.captures_iter(text) {
            for w in REGION_WORD.find_iter(&c[1]) {
                regions.extend(region_class("zone", w.as_str()));
            }
        }
    }
    if regions.len() >= 2 {
        let list: Vec<&str> = regions.iter().map(String::as_str).collect();
        out.push(ctx.finding(
            SmellId::SS5,
            ctx.lines.whole(),
            list.join(","),
            format!("file places resources in {} regions: {}", list.len(), list.join(", ")),
        ));
    }

    if chunks.len() as u64 >= cfg.ss7_max_resources_per_file {
        out.push(ctx.finding(
            SmellId::SS7,
            ctx.lines.whole(),
            chunks.len().to_string(),
            format!("file declares {} resources (limit {})", chunks.len(), cfg.ss7_max_resources_per_file),
        ));
    }
    out
}

/// SS6 over the raw texts of one directory, given as `(path, text)`.
pub fn detect_local_state(files: &[(&str, &str)]) -> Vec<SmellFinding> {
    let remote = files.iter().any(|(_, t)| CLOUD.is_match(t) || BACKEND.captures_iter(t).any(|c| &c[1] != "local"));
    if remote {
        return Vec::new();
    }
    let message = "state is kept locally; no remote backend is configured for this module".to_string();
    let mut out = Vec::new();
    for (path, text) in files {
        let Some(tf) = TERRAFORM.find(text) else { continue };
        let ctx = Ctx { path, lines: LineIndex::new(text, FileId(0)) };
        let trim = |m: regex::Match<'_>| {
            let lead = m.as_str().len() - m.as_str().trim_start().len();
            (m.start() + lead, m.end())
        };
        let (span, evidence) = match BACKEND.find(text) {
            Some(b) => {
                let (s, e) = trim(b);
                (ctx.lines.span(s, e), "local")
            }
            None => {
                let (s, e) = trim(tf);
                (ctx.lines.span(s, e), "no backend")
            }
        };
        out.push(ctx.finding(SmellId::SS6, span, evidence.to_string(), message.clone()));
    }
    if out.is_empty() {
        if let Some((path, text)) = files.iter().min_by(|a, b| a.0.cmp(b.0)) {
            let ctx = Ctx { path, lines: LineIndex::new(text, FileId(0)) };
            out.push(ctx.finding(
                SmellId::SS6,
                ctx.lines.whole(),
                "no backend".to_string(),
                "state is kept locally; no file in this module configures a backend".to_string(),
            ));
        }
    }
    out
}

/// All pattern findings for the files of one directory, in report order.
pub fn detect_directory(files: &[(&str, &str)], cfg: &DetectorConfig) -> Vec<SmellFinding> {
    let dir_suppressed = files.iter().any(|(_, t)| has_autoscaler(t, cfg));
    let mut out = Vec::new();
    for (path, text) in files {
        let suppressed = match cfg.autoscaler_scope {
            SuppressionScope::File => has_autoscaler(text, cfg),
            SuppressionScope::Directory => dir_suppressed,
        };
        out.extend(file_findings(path, text, cfg, suppressed));
    }
    out.extend(detect_local_state(files));
    sort_findings(&mut out);
    out
}
