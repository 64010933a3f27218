// SPDX-License-Identifier: Apache-2.0

//! Core of `tfsmell`, a detector for sustainability smells in Terraform
//! configurations.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It provides:
//!
//! * [`hcl`]: a tokenizer and error-recovering parser for the Terraform
//!   subset of HCL;
//! * [`catalog`]: the seven smells, their attribute vectors and the
//!   attribute similarity matrix;
//! * [`cluster`]: agglomerative clustering of smells into categories;
//! * [`detect`]: the structural (AST) detectors;
//! * [`stats`]: exact prevalence arithmetic;
//! * [`sample`]: seeded stratified sampling of files per repository.
#![no_std]

extern crate alloc;

pub mod catalog;
pub mod cluster;
pub mod detect;
pub mod hcl;
pub mod sample;
pub mod span;
pub mod stats;

pub use catalog::{Catalog, SmellDescriptor, SmellId};
pub use detect::{DetectorConfig, Engine, SmellFinding};
pub use span::{FileId, SourceSpan};
