// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

/// Region class of a region-bearing attribute value.
///
/// Values are lower-cased with whitespace removed, so `"East US"` and
/// `"eastus"` agree. For zone attributes the zone suffix is dropped:
/// `us-west1-a` becomes `us-west1` and `us-east-1a` becomes `us-east-1`.
/// Purely numeric zones (`"1"`) carry no region and yield `None`.
pub fn region_class(attr: &str, value: &str) -> Option<String> {
    let norm: String = value.chars().filter(|c| !c.is_whitespace()).flat_map(char::to_lowercase).collect();
    if norm.is_empty() {
        return None;
    }
    if !attr.contains("zone") {
        return Some(norm);
    }
    if norm.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if let Some((head, tail)) = norm.rsplit_once('-') {
        if !head.is_empty() && !tail.is_empty() && tail.len() <= 2 && tail.chars().all(|c| c.is_ascii_alphabetic()) {
            return Some(head.into());
        }
        let digits = tail.trim_end_matches(|c: char| c.is_ascii_alphabetic());
        if !digits.is_empty() && digits.len() < tail.len() && digits.chars().all(|c| c.is_ascii_digit()) {
            return Some(alloc::format!("{head}-{digits}"));
        }
    }
    Some(norm)
}
