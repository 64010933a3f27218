// SPDX-License-Identifier: Apache-2.0

//! Per-smell prevalence over a set of scanned files, kept as exact ratios.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::SmellId;

/// A non-negative fraction. Equality and ordering compare values, so
/// `1/2 == 2/4`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Ratio {
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    /// Panics when `denominator` is zero.
    pub fn new(numerator: u64, denominator: u64) -> Ratio {
        assert!(denominator > 0, "ratio with zero denominator");
        Ratio { numerator, denominator }
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Percentage in hundredths of a percent, rounded half up.
    /// 19/200 gives 950, i.e. 9.50%.
    pub fn percent_hundredths(self) -> u128 {
        let n = self.numerator as u128 * 10_000;
        let d = self.denominator as u128;
        (2 * n + d) / (2 * d)
    }

    /// `"9.50%"`.
    pub fn percent_string(self) -> String {
        let h = self.percent_hundredths();
        alloc::format!("{}.{:02}%", h / 100, h % 100)
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numerator as u128 * other.denominator as u128).cmp(&(other.numerator as u128 * self.denominator as u128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmellPrevalence {
    pub smell: SmellId,
    pub files_affected: u64,
    pub prevalence: Ratio,
    /// Display form, two decimals.
    pub percent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub scanned_files: u64,
    /// One entry per smell, SS1 first.
    pub smells: Vec<SmellPrevalence>,
}

impl CorpusStats {
    pub fn get(&self, smell: SmellId) -> Option<&SmellPrevalence> {
        self.smells.iter().find(|p| p.smell == smell)
    }

    /// Highest prevalence first; ties by smell id.
    pub fn by_prevalence(&self) -> Vec<&SmellPrevalence> {
        let mut rows: Vec<&SmellPrevalence> = self.smells.iter().collect();
        rows.sort_by(|a, b| b.prevalence.cmp(&a.prevalence).then(a.smell.cmp(&b.smell)));
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("prevalence is undefined when no files were scanned")]
    NoFiles,
    #[error("{indexed} files carry findings but only {scanned} were scanned")]
    IndexLargerThanScan { indexed: u64, scanned: u64 },
}

/// Fraction of scanned files with at least one finding of each smell.
///
/// `per_file` maps a path to the smells found in it. Files without findings
/// need not appear; they only count towards `scanned_files`.
pub fn prevalence(scanned_files: u64, per_file: &BTreeMap<String, BTreeSet<SmellId>>) -> Result<CorpusStats, StatsError> {
    if scanned_files == 0 {
        return Err(StatsError::NoFiles);
    }
    if per_file.len() as u64 > scanned_files {
        return Err(StatsError::IndexLargerThanScan { indexed: per_file.len() as u64, scanned: scanned_files });
    }
    let mut counts = [0u64; 7];
    for smells in per_file.values() {
        for s in smells {
            counts[s.index()] += 1;
        }
    }
    let smells = SmellId::ALL
        .iter()
        .map(|&smell| {
            let prevalence = Ratio::new(counts[smell.index()], scanned_files);
            SmellPrevalence { smell, files_affected: counts[smell.index()], prevalence, percent: prevalence.percent_string() }
        })
        .collect();
    Ok(CorpusStats { scanned_files, smells })
}
