// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::config::DetectorConfig;
use super::region::region_class;
use super::{Engine, SmellFinding};
use crate::catalog::SmellId;
use crate::hcl::{Block, BodyItem, ConfigFile, ExpressionValue};
use crate::span::SourceSpan;

/// Attributes that carry an instance size.
pub const SS1_SIZE_ATTRS: [&str; 3] = ["vm_size", "instance_type", "machine_type"];

fn finding(file: &ConfigFile, smell: SmellId, span: SourceSpan, evidence: String, message: String) -> SmellFinding {
    SmellFinding { smell, path: file.path.clone(), span, evidence, engine: Engine::Ast, message }
}

fn resource_type(block: &Block) -> &str {
    &block.labels[0]
}

pub(crate) fn has_autoscaler(file: &ConfigFile, cfg: &DetectorConfig) -> bool {
    file.resources().any(|r| cfg.ss2_autoscaler_types.contains(resource_type(r)))
}

/// SS1: oversized instance sizes, unless the file declares autoscaling.
pub fn detect_ss1_overprovisioning(file: &ConfigFile, cfg: &DetectorConfig) -> Vec<SmellFinding> {
    ss1(file, cfg, has_autoscaler(file, cfg))
}

pub(crate) fn ss1(file: &ConfigFile, cfg: &DetectorConfig, suppressed: bool) -> Vec<SmellFinding> {
    if suppressed {
        return Vec::new();
    }
    let mut out = Vec::new();
    for r in file.resources() {
        let rtype = resource_type(r);
        let hit = SS1_SIZE_ATTRS.iter().find_map(|name| {
            let attr = r.get_attribute_node(name)?;
            let size = attr.value.as_str()?;
            cfg.is_large_size(rtype, size).then_some((attr, size))
        });
        if let Some((attr, size)) = hit {
            out.push(finding(
                file,
                SmellId::SS1,
                attr.span,
                size.to_string(),
                format!("{} uses oversized {} `{}`", r.address().unwrap_or_default(), attr.name, size),
            ));
        }
    }
    out
}

/// SS2: compute resources with a fixed `count` and no autoscaling resource
/// in the file.
pub fn detect_ss2_no_autoscaling(file: &ConfigFile, cfg: &DetectorConfig) -> Vec<SmellFinding> {
    ss2(file, cfg, has_autoscaler(file, cfg))
}

pub(crate) fn ss2(file: &ConfigFile, cfg: &DetectorConfig, suppressed: bool) -> Vec<SmellFinding> {
    if suppressed {
        return Vec::new();
    }
    let mut out = Vec::new();
    for r in file.resources().filter(|r| cfg.ss2_compute_types.contains(resource_type(r))) {
        let Some(attr) = r.get_attribute_node("count") else { continue };
        let Some(n) = attr.value.as_number().and_then(|n| n.as_i64()) else { continue };
        if n >= 0 && n as u64 >= cfg.ss2_fixed_count_min {
            out.push(finding(
                file,
                SmellId::SS2,
                attr.span,
                format!("count={n}"),
                format!("{} has a fixed count of {n} and no autoscaling resource", r.address().unwrap_or_default()),
            ));
        }
    }
    out
}

/// SS3: stateful resources without a `lifecycle` block.
pub fn detect_ss3_no_lifecycle(file: &ConfigFile, cfg: &DetectorConfig) -> Vec<SmellFinding> {
    file.resources()
        .filter(|r| cfg.ss3_lifecycle_required_types.contains(resource_type(r)) && !r.has_block("lifecycle"))
        .map(|r| {
            finding(
                file,
                SmellId::SS3,
                r.span,
                resource_type(r).to_string(),
                format!("{} has no lifecycle block", r.address().unwrap_or_default()),
            )
        })
        .collect()
}

/// SS4: log groups retained longer than the limit, or with no retention.
pub fn detect_ss4_excessive_logging(file: &ConfigFile, cfg: &DetectorConfig) -> Vec<SmellFinding> {
    let mut out = Vec::new();
    for r in file.resources() {
        let Some(attr_name) = cfg.ss4_log_group_types.get(resource_type(r)) else { continue };
        let address = r.address().unwrap_or_default();
        match r.get_attribute_node(attr_name) {
            Some(attr) => {
                let Some(n) = attr.value.as_number() else { continue };
                if n.as_f64().is_some_and(|days| days > cfg.ss4_retention_max_days as f64) {
                    out.push(finding(
                        file,
                        SmellId::SS4,
                        attr.span,
                        n.raw.clone(),
                        format!(
                            "{address} retains logs for {} days (limit {})",
                            n.raw, cfg.ss4_retention_max_days
                        ),
                    ));
                }
            }
            None if cfg.ss4_flag_missing_retention => out.push(finding(
                file,
                SmellId::SS4,
                r.span,
                "unset".to_string(),
                format!("{address} sets no `{attr_name}`, so logs are kept indefinitely"),
            )),
            None => {}
        }
    }
    out
}

fn region_of(block: &Block, cfg: &DetectorConfig) -> Option<String> {
    cfg.ss5_region_attrs
        .iter()
        .find_map(|name| block.get_attribute(name).and_then(ExpressionValue::as_str).and_then(|v| region_class(name, v)))
}

fn for_each_reference<'a>(body: &'a [BodyItem], f: &mut dyn FnMut(&'a [String], SourceSpan)) {
    for item in body {
        match item {
            BodyItem::Attribute(a) => {
                let span = a.span;
                a.value.for_each_reference(&mut |segs| f(segs, span));
            }
            BodyItem::Block(b) => for_each_reference(&b.body, f),
        }
    }
}

/// SS5: pairs of resources in different regions where one references the
/// other. One finding per pair, on the first referencing attribute.
pub fn detect_ss5_cross_region_transfer(file: &ConfigFile, cfg: &DetectorConfig) -> Vec<SmellFinding> {
    let resources: Vec<&Block> = file.resources().collect();
    let regions: Vec<Option<String>> = resources.iter().map(|r| region_of(r, cfg)).collect();
    let mut seen: Vec<(usize, usize)> = Vec::new();
    let mut out = Vec::new();
    for (i, r) in resources.iter().enumerate() {
        let mut refs: Vec<(usize, SourceSpan)> = Vec::new();
        for_each_reference(&r.body, &mut |segs, span| {
            if segs.len() < 2 {
                return;
            }
            if let Some(j) = resources.iter().position(|o| o.labels[0] == segs[0] && o.labels[1] == segs[1]) {
                if j != i {
                    refs.push((j, span));
                }
            }
        });
        for (j, span) in refs {
            let pair = (i.min(j), i.max(j));
            if seen.contains(&pair) {
                continue;
            }
            seen.push(pair);
            if let (Some(a), Some(b)) = (&regions[i], &regions[j]) {
                if a != b {
                    let target = resources[j].address().unwrap_or_default();
                    out.push(finding(
                        file,
                        SmellId::SS5,
                        span,
                        target.clone(),
                        format!("{} in {a} references {target} in {b}", r.address().unwrap_or_default()),
                    ));
                }
            }
        }
    }
    out
}

fn terraform_blocks(f: &ConfigFile) -> Vec<&Block> {
    f.blocks().filter(|b| b.block_type == "terraform").collect()
}

fn is_remote_state(terraform: &Block) -> bool {
    terraform.blocks().any(|b| {
        (b.block_type == "backend" && b.labels.first().is_some_and(|l| l != "local")) || b.block_type == "cloud"
    })
}

/// SS6: a directory with no remote backend. Findings go to each file with
/// a `terraform` block, or to the first file by path when none has one.
pub fn detect_ss6_local_state(files: &[ConfigFile], _cfg: &DetectorConfig) -> Vec<SmellFinding> {
    if files.iter().any(|f| terraform_blocks(f).into_iter().any(is_remote_state)) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for f in files {
        let blocks = terraform_blocks(f);
        let Some(first) = blocks.first() else { continue };
        let local = blocks.iter().flat_map(|t| t.blocks()).find(|b| b.block_type == "backend");
        let (span, evidence) = match local {
            Some(b) => (b.span, "local"),
            None => (first.span, "no backend"),
        };
        out.push(finding(
            f,
            SmellId::SS6,
            span,
            evidence.to_string(),
            "state is kept locally; no remote backend is configured for this module".to_string(),
        ));
    }
    if out.is_empty() {
        if let Some(f) = files.iter().min_by(|a, b| a.path.cmp(&b.path)) {
            out.push(finding(
                f,
                SmellId::SS6,
                f.span,
                "no backend".to_string(),
                "state is kept locally; no file in this module configures a backend".to_string(),
            ));
        }
    }
    out
}

/// SS7: a file declaring at least the configured number of resources.
pub fn detect_ss7_monolithic(file: &ConfigFile, cfg: &DetectorConfig) -> Vec<SmellFinding> {
    let count = file.blocks().filter(|b| b.block_type == "resource").count();
    if (count as u64) < cfg.ss7_max_resources_per_file {
        return Vec::new();
    }
    alloc::vec![finding(
        file,
        SmellId::SS7,
        file.span,
        count.to_string(),
        format!("file declares {count} resources (limit {})", cfg.ss7_max_resources_per_file),
    )]
}
