// SPDX-License-Identifier: Apache-2.0

//! Seeded stratified sampling: a few files from each repository.
//!
//! The generator is ChaCha8 seeded with `seed_from_u64(seed)`. Repositories
//! are visited in ascending name order and each repository's file list is
//! sorted and deduplicated first. For a repository with more than four
//! files, one draw of `uniform(2)` picks a sample size of 4 (draw 0) or 5
//! (draw 1), capped at the file count; the files are then chosen by a
//! partial Fisher-Yates shuffle (`j = i + uniform(n - i)` for each `i < k`)
//! and the chosen paths are returned sorted. `uniform(n)` draws `next_u64`
//! and rejects values at or above the largest multiple of `n`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

pub const MIN_PER_REPO: usize = 4;
pub const MAX_PER_REPO: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub seed: u64,
    pub selections: BTreeMap<String, Vec<String>>,
}

impl SampleSet {
    pub fn total(&self) -> usize {
        self.selections.values().map(Vec::len).sum()
    }
}

/// Uniform integer in `0..n` by rejection. `n` must be non-zero.
pub fn uniform_below(rng: &mut impl RngCore, n: u64) -> u64 {
    assert!(n > 0);
    let zone = u64::MAX - (u64::MAX - n + 1) % n;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % n;
        }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Full Fisher-Yates shuffle from the back.
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = rng_from_seed(seed);
    for i in (1..items.len()).rev() {
        let j = uniform_below(&mut rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

pub fn sample_stratified(manifest: &BTreeMap<String, Vec<String>>, seed: u64) -> SampleSet {
    let mut rng = rng_from_seed(seed);
    let mut selections = BTreeMap::new();
    for (repo, files) in manifest {
        let mut files = files.clone();
        files.sort();
        files.dedup();
        let n = files.len();
        let chosen = if n <= MIN_PER_REPO {
            files
        } else {
            let k = (MIN_PER_REPO + uniform_below(&mut rng, 2) as usize).min(n);
            for i in 0..k {
                let j = i + uniform_below(&mut rng, (n - i) as u64) as usize;
                files.swap(i, j);
            }
            files.truncate(k);
            files.sort();
            files
        };
        selections.insert(repo.clone(), chosen);
    }
    SampleSet { seed, selections }
}
