// SPDX-License-Identifier: Apache-2.0

//! The sustainability smell catalog.
//!
//! Each smell carries four boolean attributes describing what information a
//! practitioner needs before acting on it. Two smells are similar exactly
//! when all four attributes agree, which makes similarity a 0/1 relation.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cluster;

/// Version of the built-in catalog, reported by `--version`.
pub const CATALOG_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SmellId {
    SS1,
    SS2,
    SS3,
    SS4,
    SS5,
    SS6,
    SS7,
}

impl SmellId {
    pub const ALL: [SmellId; 7] =
        [SmellId::SS1, SmellId::SS2, SmellId::SS3, SmellId::SS4, SmellId::SS5, SmellId::SS6, SmellId::SS7];

    /// 1 for SS1 through 7 for SS7.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        ["SS1", "SS2", "SS3", "SS4", "SS5", "SS6", "SS7"][self.index()]
    }
}

impl fmt::Display for SmellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown smell id `{0}` (expected SS1..SS7)")]
pub struct UnknownSmellId(pub String);

impl FromStr for SmellId {
    type Err = UnknownSmellId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SmellId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownSmellId(s.to_string()))
    }
}

impl Serialize for SmellId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SmellId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AttributeVector {
    pub runtime_dependency: bool,
    pub resource_context: bool,
    pub code_dependency: bool,
    pub inherent_badness: bool,
}

impl AttributeVector {
    pub const fn new(runtime_dependency: bool, resource_context: bool, code_dependency: bool, inherent_badness: bool) -> Self {
        AttributeVector { runtime_dependency, resource_context, code_dependency, inherent_badness }
    }

    pub fn from_array(bits: [bool; 4]) -> Self {
        AttributeVector::new(bits[0], bits[1], bits[2], bits[3])
    }

    pub fn to_array(self) -> [bool; 4] {
        [self.runtime_dependency, self.resource_context, self.code_dependency, self.inherent_badness]
    }
}

/// 1 when all four attributes agree, else 0.
pub fn similarity(a: AttributeVector, b: AttributeVector) -> u8 {
    u8::from(a == b)
}

/// Category number. The built-in catalog uses 1 (general), 2 (demand) and
/// 3 (application); catalogs loaded from files may produce more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Category(pub u32);

impl Category {
    pub const GENERAL: Category = Category(1);
    pub const DEMAND: Category = Category(2);
    pub const APPLICATION: Category = Category(3);

    pub fn name(self) -> &'static str {
        match self.0 {
            1 => "General",
            2 => "Demand",
            3 => "Application",
            _ => "Other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmellDescriptor {
    pub id: SmellId,
    pub name: String,
    pub category: Category,
    pub attributes: AttributeVector,
    pub summary: String,
    pub remediation: String,
}

/// One record of a catalog file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub id: SmellId,
    pub name: String,
    /// runtime dependency, resource context, code dependency, inherent badness
    pub attributes: [bool; 4],
    pub summary: String,
    pub remediation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog is empty")]
    Empty,
    #[error("smell {0} appears more than once")]
    Duplicate(SmellId),
    #[error("smell {0} has an empty name")]
    EmptyName(SmellId),
}

/// An ordered set of smell descriptors with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Catalog {
    descriptors: Vec<SmellDescriptor>,
}

struct Builtin {
    id: SmellId,
    name: &'static str,
    category: Category,
    bits: [bool; 4],
    summary: &'static str,
    remediation: &'static str,
}

const BUILTIN: [Builtin; 7] = [
    Builtin {
        id: SmellId::SS1,
        name: "Over-Provisioning Resources",
        category: Category::DEMAND,
        bits: [true, true, false, false],
        summary: "A compute resource is sized well above what its workload is likely to use.",
        remediation: "Compare the configured size with observed utilisation and move to a smaller size where the headroom is unused.",
    },
    Builtin {
        id: SmellId::SS2,
        name: "Lack of Auto-Scaling",
        category: Category::DEMAND,
        bits: [true, true, false, false],
        summary: "Compute capacity is a fixed instance count with no scaling policy attached.",
        remediation: "Put the instances behind an autoscaling group or scale set so capacity follows demand.",
    },
    Builtin {
        id: SmellId::SS3,
        name: "Ignoring Resource Lifecycles",
        category: Category::GENERAL,
        bits: [false, false, false, true],
        summary: "A stateful resource is declared without a lifecycle block governing replacement or deletion.",
        remediation: "Add a lifecycle block (for example create_before_destroy or prevent_destroy) to control how the resource is replaced.",
    },
    Builtin {
        id: SmellId::SS4,
        name: "Excessive Logging",
        category: Category::GENERAL,
        bits: [false, false, false, true],
        summary: "Logs are kept for a long or unlimited period.",
        remediation: "Set an explicit retention period that matches how long the logs are actually needed.",
    },
    Builtin {
        id: SmellId::SS5,
        name: "Unoptimized Data Transfers",
        category: Category::APPLICATION,
        bits: [false, false, true, false],
        summary: "Resources that talk to each other are placed in different regions.",
        remediation: "Place resources that exchange data in the same region.",
    },
    Builtin {
        id: SmellId::SS6,
        name: "State Management",
        category: Category::GENERAL,
        bits: [false, false, false, true],
        summary: "The root module keeps Terraform state locally instead of in a remote backend.",
        remediation: "Configure a remote backend so state is shared, locked and versioned.",
    },
    Builtin {
        id: SmellId::SS7,
        name: "Monolithic Infrastructure",
        category: Category::GENERAL,
        bits: [false, false, false, true],
        summary: "A single file declares a large number of resources.",
        remediation: "Split the configuration into modules or smaller files grouped by concern.",
    },
];

/// The built-in catalog, ordered SS1..SS7.
pub fn catalog() -> Catalog {
    Catalog {
        descriptors: BUILTIN
            .iter()
            .map(|b| SmellDescriptor {
                id: b.id,
                name: b.name.to_string(),
                category: b.category,
                attributes: AttributeVector::from_array(b.bits),
                summary: b.summary.to_string(),
                remediation: b.remediation.to_string(),
            })
            .collect(),
    }
}

impl Default for Catalog {
    fn default() -> Self {
        catalog()
    }
}

impl Catalog {
    /// Builds a catalog from file records. Categories are derived by
    /// clustering the attribute vectors.
    pub fn from_entries(entries: Vec<CatalogEntry>) -> Result<Catalog, CatalogError> {
        if entries.is_empty() {
            return Err(CatalogError::Empty);
        }
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|p| p.id == e.id) {
                return Err(CatalogError::Duplicate(e.id));
            }
            if e.name.trim().is_empty() {
                return Err(CatalogError::EmptyName(e.id));
            }
        }
        let mut cat = Catalog {
            descriptors: entries
                .into_iter()
                .map(|e| SmellDescriptor {
                    id: e.id,
                    name: e.name,
                    category: Category(0),
                    attributes: AttributeVector::from_array(e.attributes),
                    summary: e.summary,
                    remediation: e.remediation,
                })
                .collect(),
        };
        let assignment = cluster::categorize(&cat);
        for d in &mut cat.descriptors {
            d.category = Category(assignment.label_of(&d.id).expect("every smell is assigned") as u32);
        }
        Ok(cat)
    }

    pub fn to_entries(&self) -> Vec<CatalogEntry> {
        self.descriptors
            .iter()
            .map(|d| CatalogEntry {
                id: d.id,
                name: d.name.clone(),
                attributes: d.attributes.to_array(),
                summary: d.summary.clone(),
                remediation: d.remediation.clone(),
            })
            .collect()
    }

    pub fn descriptors(&self) -> &[SmellDescriptor] {
        &self.descriptors
    }

    pub fn get(&self, id: SmellId) -> Option<&SmellDescriptor> {
        self.descriptors.iter().find(|d| d.id == id)
    }

    pub fn ids(&self) -> Vec<SmellId> {
        self.descriptors.iter().map(|d| d.id).collect()
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    /// Same descriptors in a different order. `order` lists positions in
    /// the current catalog.
    pub fn permuted(&self, order: &[usize]) -> Catalog {
        Catalog { descriptors: order.iter().map(|&i| self.descriptors[i].clone()).collect() }
    }
}

impl core::ops::Index<usize> for Catalog {
    type Output = SmellDescriptor;

    fn index(&self, i: usize) -> &SmellDescriptor {
        &self.descriptors[i]
    }
}

/// Pairwise 0/1 similarity between the smells of a catalog, in catalog
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimilarityMatrix {
    pub ids: Vec<SmellId>,
    pub entries: Vec<Vec<u8>>,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, a: SmellId, b: SmellId) -> Option<u8> {
        let i = self.ids.iter().position(|x| *x == a)?;
        let j = self.ids.iter().position(|x| *x == b)?;
        Some(self.entries[i][j])
    }
}

pub fn similarity_matrix(catalog: &Catalog) -> SimilarityMatrix {
    let d = catalog.descriptors();
    SimilarityMatrix {
        ids: catalog.ids(),
        entries: d.iter().map(|a| d.iter().map(|b| similarity(a.attributes, b.attributes)).collect()).collect(),
    }
}
