// SPDX-License-Identifier: Apache-2.0

//! Detector thresholds and resource-type tables.
//!
//! Every default here is a project choice. Deserialization is strict:
//! unknown keys are rejected and missing keys take their defaults.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

const LARGE_SIZES: &str = include_str!("../../data/ss1_large_sizes.txt");

/// Where an autoscaling resource suppresses SS1 and SS2 findings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuppressionScope {
    #[default]
    File,
    Directory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    /// Provider prefix (`aws`, `azurerm`, `google`) to oversized sizes.
    pub ss1_large_sizes: BTreeMap<String, BTreeSet<String>>,
    pub ss2_fixed_count_min: u64,
    pub ss2_compute_types: BTreeSet<String>,
    pub ss2_autoscaler_types: BTreeSet<String>,
    pub autoscaler_scope: SuppressionScope,
    pub ss3_lifecycle_required_types: BTreeSet<String>,
    pub ss4_retention_max_days: u64,
    pub ss4_flag_missing_retention: bool,
    /// Log-group resource type to the attribute holding its retention in
    /// days.
    pub ss4_log_group_types: BTreeMap<String, String>,
    /// Region-bearing attributes, in lookup priority order.
    pub ss5_region_attrs: Vec<String>,
    /// Pattern engine only: also collect region names written in comments.
    pub ss5_scan_comments: bool,
    pub ss7_max_resources_per_file: u64,
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Built-in oversized-size table.
pub fn default_large_sizes() -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for line in LARGE_SIZES.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let mut parts = line.split_whitespace();
        if let (Some(provider), Some(size)) = (parts.next(), parts.next()) {
            out.entry(provider.to_string()).or_default().insert(size.to_string());
        }
    }
    out
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            ss1_large_sizes: default_large_sizes(),
            ss2_fixed_count_min: 2,
            ss2_compute_types: set(&[
                "aws_instance",
                "azurerm_virtual_machine",
                "azurerm_linux_virtual_machine",
                "azurerm_windows_virtual_machine",
                "google_compute_instance",
            ]),
            ss2_autoscaler_types: set(&[
                "aws_autoscaling_group",
                "aws_autoscaling_policy",
                "aws_appautoscaling_target",
                "aws_appautoscaling_policy",
                "azurerm_virtual_machine_scale_set",
                "azurerm_linux_virtual_machine_scale_set",
                "azurerm_windows_virtual_machine_scale_set",
                "azurerm_orchestrated_virtual_machine_scale_set",
                "azurerm_monitor_autoscale_setting",
                "google_compute_autoscaler",
                "google_compute_region_autoscaler",
            ]),
            autoscaler_scope: SuppressionScope::File,
            ss3_lifecycle_required_types: set(&[
                "aws_ebs_volume",
                "aws_db_instance",
                "aws_rds_cluster",
                "aws_s3_bucket",
                "aws_dynamodb_table",
                "aws_efs_file_system",
                "azurerm_managed_disk",
                "azurerm_storage_account",
                "azurerm_mssql_database",
                "azurerm_postgresql_flexible_server",
                "google_compute_disk",
                "google_sql_database_instance",
                "google_storage_bucket",
            ]),
            ss4_retention_max_days: 90,
            ss4_flag_missing_retention: true,
            ss4_log_group_types: [
                ("aws_cloudwatch_log_group", "retention_in_days"),
                ("azurerm_log_analytics_workspace", "retention_in_days"),
                ("google_logging_project_bucket_config", "retention_days"),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
            ss5_region_attrs: ["region", "location", "zone", "availability_zone"].map(String::from).to_vec(),
            ss5_scan_comments: false,
            ss7_max_resources_per_file: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("`{0}` must be at least 1")]
    ThresholdTooSmall(&'static str),
    #[error("`{0}` must not be empty")]
    EmptySet(&'static str),
    #[error("`ss5_region_attrs` lists `{0}` more than once")]
    DuplicateRegionAttr(String),
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("ss2_fixed_count_min", self.ss2_fixed_count_min),
            ("ss4_retention_max_days", self.ss4_retention_max_days),
            ("ss7_max_resources_per_file", self.ss7_max_resources_per_file),
        ] {
            if value < 1 {
                return Err(ConfigError::ThresholdTooSmall(name));
            }
        }
        let checks: [(&'static str, bool); 6] = [
            ("ss1_large_sizes", self.ss1_large_sizes.values().all(BTreeSet::is_empty)),
            ("ss2_compute_types", self.ss2_compute_types.is_empty()),
            ("ss2_autoscaler_types", self.ss2_autoscaler_types.is_empty()),
            ("ss3_lifecycle_required_types", self.ss3_lifecycle_required_types.is_empty()),
            ("ss4_log_group_types", self.ss4_log_group_types.is_empty()),
            ("ss5_region_attrs", self.ss5_region_attrs.is_empty()),
        ];
        if let Some((name, _)) = checks.iter().find(|(_, empty)| *empty) {
            return Err(ConfigError::EmptySet(name));
        }
        for (i, a) in self.ss5_region_attrs.iter().enumerate() {
            if self.ss5_region_attrs[..i].contains(a) {
                return Err(ConfigError::DuplicateRegionAttr(a.clone()));
            }
        }
        Ok(())
    }

    /// True when `size` is listed as oversized for the provider of
    /// `resource_type`.
    pub fn is_large_size(&self, resource_type: &str, size: &str) -> bool {
        self.ss1_large_sizes
            .get(provider_prefix(resource_type))
            .is_some_and(|sizes| sizes.iter().any(|s| s.eq_ignore_ascii_case(size)))
    }
}

/// `aws` for `aws_instance`, `google` for `google_compute_disk`.
pub fn provider_prefix(resource_type: &str) -> &str {
    resource_type.split('_').next().unwrap_or(resource_type)
}
