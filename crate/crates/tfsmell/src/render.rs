//! Report output: a text table, canonical JSON and SARIF 2.1.0.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;
use tfsmell_core::catalog::Catalog;
use tfsmell_core::stats::CorpusStats;
use tfsmell_core::{Engine, SmellFinding, SmellId};

use crate::scan::ScanReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Sarif,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown format `{0}` (expected text, json or sarif)")]
pub struct UnknownFormat(pub String);

impl FromStr for Format {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, UnknownFormat> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "sarif" => Ok(Format::Sarif),
            other => Err(UnknownFormat(other.to_string())),
        }
    }
}

/// JSON view of a report. An empty scan is just
/// `{"scanned_files":0,"findings":[]}`.
#[derive(Serialize)]
struct JsonReport<'a> {
    scanned_files: u64,
    findings: &'a [SmellFinding],
    #[serde(skip_serializing_if = "Option::is_none")]
    parse_failures: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    engine: Option<Engine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config_digest: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_file_index: Option<&'a BTreeMap<String, std::collections::BTreeSet<SmellId>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<&'a CorpusStats>,
}

pub fn json(report: &ScanReport, stats: Option<&CorpusStats>) -> String {
    let full = report.scanned_files > 0;
    let view = JsonReport {
        scanned_files: report.scanned_files,
        findings: &report.findings,
        parse_failures: full.then_some(report.parse_failures),
        engine: full.then_some(report.engine),
        config_digest: full.then_some(report.config_digest.as_str()),
        per_file_index: full.then_some(&report.per_file_index),
        stats: stats.filter(|_| full),
    };
    serde_json::to_string(&view).expect("report serializes")
}

fn rule_name(name: &str) -> String {
    name.split(|c: char| !c.is_ascii_alphanumeric()).filter(|w| !w.is_empty()).collect()
}

pub fn sarif(report: &ScanReport, catalog: &Catalog) -> String {
    let ids = catalog.ids();
    let rules: Vec<_> = catalog
        .descriptors()
        .iter()
        .map(|d| {
            json!({
                "id": d.id.as_str(),
                "name": rule_name(&d.name),
                "shortDescription": { "text": d.name },
                "fullDescription": { "text": d.summary },
                "help": { "text": d.remediation },
                "properties": { "category": d.category.0, "categoryName": d.category.name() },
            })
        })
        .collect();
    let results: Vec<_> = report
        .findings
        .iter()
        .map(|f| {
            json!({
                "ruleId": f.smell.as_str(),
                "ruleIndex": ids.iter().position(|i| *i == f.smell),
                "level": "warning",
                "message": { "text": f.message },
                "locations": [{
                    "physicalLocation": {
                        "artifactLocation": { "uri": f.path },
                        "region": {
                            "startLine": f.span.start_line,
                            "startColumn": f.span.start_col,
                            "endLine": f.span.end_line,
                            "endColumn": f.span.end_col,
                        }
                    }
                }],
                "properties": { "evidence": f.evidence, "engine": f.engine.as_str() },
            })
        })
        .collect();
    let doc = json!({
        "$schema": "https://json.schemastore.org/sarif-2.1.0.json",
        "version": "2.1.0",
        "runs": [{
            "tool": { "driver": {
                "name": "tfsmell",
                "version": env!("CARGO_PKG_VERSION"),
                "rules": rules,
            }},
            "results": results,
        }],
    });
    serde_json::to_string(&doc).expect("sarif serializes")
}

pub fn findings_text(report: &ScanReport) -> String {
    let mut out = String::new();
    for f in &report.findings {
        let _ = writeln!(out, "{}:{}:{}: {} {} [{}]", f.path, f.span.start_line, f.span.start_col, f.smell, f.message, f.evidence);
    }
    out
}

pub fn stats_table(stats: &CorpusStats, catalog: &Catalog) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<5} {:<30} {:>8} {:>10}", "smell", "name", "files", "prevalence");
    for row in stats.by_prevalence() {
        let Some(d) = catalog.get(row.smell) else { continue };
        let _ = writeln!(out, "{:<5} {:<30} {:>8} {:>10}", row.smell.as_str(), d.name, row.files_affected, row.percent);
    }
    out
}

/// Text form: findings, then the prevalence table when there is one.
pub fn text(report: &ScanReport, stats: Option<&CorpusStats>, catalog: &Catalog) -> String {
    let mut out = findings_text(report);
    if !out.is_empty() {
        out.push('\n');
    }
    if let Some(stats) = stats {
        out.push_str(&stats_table(stats, catalog));
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "{} files scanned, {} parse failures, {} findings ({} engine)",
        report.scanned_files,
        report.parse_failures,
        report.findings.len(),
        report.engine
    );
    out
}

pub fn render(report: &ScanReport, stats: Option<&CorpusStats>, catalog: &Catalog, format: Format) -> String {
    match format {
        Format::Text => text(report, stats, catalog),
        Format::Json => json(report, stats),
        Format::Sarif => sarif(report, catalog),
    }
}
