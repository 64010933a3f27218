// SPDX-License-Identifier: Apache-2.0

//! Structural smell detectors over parsed configuration files.
//!
//! Each detector is a pure function of the parsed file (or, for SS6, of
//! every file in one directory) and the [`DetectorConfig`]. The pattern
//! engine, which works on raw text, lives in the std crate and emits the
//! same [`SmellFinding`] records tagged [`Engine::Pattern`].

mod config;
mod region;
mod rules;

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use config::{default_large_sizes, provider_prefix, ConfigError, DetectorConfig, SuppressionScope};
pub use region::region_class;
pub use rules::{
    detect_ss1_overprovisioning, detect_ss2_no_autoscaling, detect_ss3_no_lifecycle, detect_ss4_excessive_logging,
    detect_ss5_cross_region_transfer, detect_ss6_local_state, detect_ss7_monolithic, SS1_SIZE_ATTRS,
};

use crate::catalog::SmellId;
use crate::hcl::ConfigFile;
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Ast,
    Pattern,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Ast => "ast",
            Engine::Pattern => "pattern",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ast" => Ok(Engine::Ast),
            "pattern" => Ok(Engine::Pattern),
            other => Err(alloc::format!("unknown engine `{other}` (expected ast or pattern)")),
        }
    }
}

/// One detected smell occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmellFinding {
    pub smell: SmellId,
    pub path: String,
    /// The offending node, or the whole file for file-level smells.
    pub span: SourceSpan,
    /// The matched value or count. Never empty.
    pub evidence: String,
    pub engine: Engine,
    pub message: String,
}

impl SmellFinding {
    /// Report order: path, line, smell, then column and evidence.
    pub fn report_cmp(&self, other: &Self) -> Ordering {
        (&self.path, self.span.start_line, self.smell, self.span.start_col, &self.evidence, self.engine).cmp(&(
            &other.path,
            other.span.start_line,
            other.smell,
            other.span.start_col,
            &other.evidence,
            other.engine,
        ))
    }
}

pub fn sort_findings(findings: &mut [SmellFinding]) {
    findings.sort_by(SmellFinding::report_cmp);
}

/// All smells for the files of one directory (one root module).
pub fn detect_directory(files: &[ConfigFile], cfg: &DetectorConfig) -> Vec<SmellFinding> {
    let dir_has_autoscaler = files.iter().any(|f| rules::has_autoscaler(f, cfg));
    let mut out = Vec::new();
    for file in files {
        let suppressed = match cfg.autoscaler_scope {
            SuppressionScope::File => rules::has_autoscaler(file, cfg),
            SuppressionScope::Directory => dir_has_autoscaler,
        };
        out.extend(rules::ss1(file, cfg, suppressed));
        out.extend(rules::ss2(file, cfg, suppressed));
        out.extend(detect_ss3_no_lifecycle(file, cfg));
        out.extend(detect_ss4_excessive_logging(file, cfg));
        out.extend(detect_ss5_cross_region_transfer(file, cfg));
        out.extend(detect_ss7_monolithic(file, cfg));
    }
    out.extend(detect_ss6_local_state(files, cfg));
    sort_findings(&mut out);
    out
}

/// All smells over several directories, in report order.
pub fn detect_all<'a, I>(directories: I, cfg: &DetectorConfig) -> Vec<SmellFinding>
where
    I: IntoIterator<Item = &'a [ConfigFile]>,
{
    let mut out: Vec<SmellFinding> = directories.into_iter().flat_map(|files| detect_directory(files, cfg)).collect();
    sort_findings(&mut out);
    out
}
