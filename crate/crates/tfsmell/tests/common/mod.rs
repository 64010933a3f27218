//! Synthetic corpus with a planting plan known in advance.

#![allow(dead_code)]

pub mod stub;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use tfsmell_core::sample::shuffle;
use tfsmell_core::SmellId;

pub const FILES: usize = 200;
pub const PER_DIR: usize = 10;

/// How many files carry each smell. SS6 is planted on the first file of a
/// directory, so its count is a number of directories.
pub const PLAN: [(SmellId, usize); 7] = [
    (SmellId::SS1, 2),
    (SmellId::SS2, 3),
    (SmellId::SS3, 5),
    (SmellId::SS4, 7),
    (SmellId::SS5, 1),
    (SmellId::SS6, 3),
    (SmellId::SS7, 19),
];

pub fn path_of(i: usize) -> String {
    format!("d{:02}/f{}.tf", i / PER_DIR, i % PER_DIR)
}

/// File index to planted smells. Files without smells are absent.
pub fn planting() -> BTreeMap<usize, BTreeSet<SmellId>> {
    let mut plan: BTreeMap<usize, BTreeSet<SmellId>> = BTreeMap::new();
    for (k, (smell, count)) in PLAN.iter().enumerate() {
        let mut pool: Vec<usize> = if *smell == SmellId::SS6 {
            (0..FILES).step_by(PER_DIR).collect()
        } else {
            (0..FILES).collect()
        };
        shuffle(&mut pool, 1000 + k as u64);
        for &i in &pool[..*count] {
            plan.entry(i).or_default().insert(*smell);
        }
    }
    plan
}

pub fn expected_index() -> BTreeMap<String, BTreeSet<SmellId>> {
    planting().into_iter().map(|(i, s)| (path_of(i), s)).collect()
}

pub fn content(i: usize, smells: &BTreeSet<SmellId>) -> String {
    let mut t = String::new();
    if i.is_multiple_of(PER_DIR) {
        let backend = if smells.contains(&SmellId::SS6) { "local" } else { "gcs" };
        let _ = writeln!(t, "terraform {{\n  backend \"{backend}\" {{\n    prefix = \"d{}\"\n  }}\n}}\n", i / PER_DIR);
    }
    let _ = writeln!(t, "variable \"v{i}\" {{\n  default = {i}\n}}\n");
    let _ = writeln!(t, "resource \"null_resource\" \"base\" {{\n  triggers = {{\n    id = \"{i}\"\n  }}\n}}\n");
    for s in smells {
        match s {
            SmellId::SS1 => t.push_str("resource \"aws_instance\" \"big\" {\n  ami           = \"ami-1\"\n  instance_type = \"m5.24xlarge\"\n}\n\n"),
            SmellId::SS2 => t.push_str("resource \"aws_instance\" \"fleet\" {\n  count         = 4\n  instance_type = \"t3.micro\"\n}\n\n"),
            SmellId::SS3 => t.push_str("resource \"aws_ebs_volume\" \"data\" {\n  size = 20\n}\n\n"),
            SmellId::SS4 => t.push_str("resource \"aws_cloudwatch_log_group\" \"logs\" {\n  retention_in_days = 365\n}\n\n"),
            SmellId::SS5 => t.push_str(
                "resource \"google_compute_address\" \"eu\" {\n  region = \"europe-west1\"\n}\n\n\
                 resource \"google_compute_instance\" \"us\" {\n  zone    = \"us-west1-a\"\n  address = google_compute_address.eu.address\n}\n\n",
            ),
            SmellId::SS6 => {}
            SmellId::SS7 => {
                for k in 0..11 {
                    let _ = writeln!(t, "resource \"null_resource\" \"n{k}\" {{}}\n");
                }
            }
        }
    }
    t
}

/// Writes the corpus under `root`, creating files in an order fixed by
/// `order_seed` so directory listings differ between seeds.
pub fn write_corpus(root: &Path, order_seed: u64) {
    let plan = planting();
    let empty = BTreeSet::new();
    let mut order: Vec<usize> = (0..FILES).collect();
    shuffle(&mut order, order_seed);
    for i in order {
        let path = root.join(path_of(i));
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, content(i, plan.get(&i).unwrap_or(&empty))).unwrap();
    }
}
