// SPDX-License-Identifier: Apache-2.0

//! Agglomerative hierarchical clustering over smell attribute vectors.
//!
//! Distances are `1 - similarity`. Clustering starts from singletons and
//! repeatedly merges the two closest clusters. When several pairs share the
//! minimum distance, the pair whose (smaller, larger) minimum leaf indices
//! sort first is merged, so results are fully deterministic.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::catalog::{similarity_matrix, Catalog, SimilarityMatrix, SmellId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

impl Linkage {
    pub const ALL: [Linkage; 3] = [Linkage::Single, Linkage::Complete, Linkage::Average];
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClusterError {
    #[error("distance matrix has {rows} rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
    #[error("distance matrix row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("distance matrix has a non-zero diagonal at {0}")]
    NonZeroDiagonal(usize),
    #[error("distance at ({0}, {1}) is negative or not finite")]
    InvalidDistance(usize, usize),
}

/// Square, symmetric distance matrix with zero diagonal and labelled rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<L = SmellId> {
    labels: Vec<L>,
    rows: Vec<Vec<f64>>,
}

impl<L: Clone> DistanceMatrix<L> {
    pub fn new(labels: Vec<L>, rows: Vec<Vec<f64>>) -> Result<Self, ClusterError> {
        let n = rows.len();
        if labels.len() != n {
            return Err(ClusterError::LabelCount { rows: n, labels: labels.len() });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ClusterError::NotSquare { row: i, len: row.len(), expected: n });
            }
        }
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(ClusterError::NonZeroDiagonal(i));
            }
            for j in 0..n {
                if !rows[i][j].is_finite() || rows[i][j] < 0.0 {
                    return Err(ClusterError::InvalidDistance(i, j));
                }
                if rows[i][j] != rows[j][i] {
                    return Err(ClusterError::Asymmetric(i, j));
                }
            }
        }
        Ok(DistanceMatrix { labels, rows })
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    /// Same matrix with rows and columns reordered; `order[k]` is the old
    /// index placed at position `k`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        DistanceMatrix {
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
            rows: order.iter().map(|&i| order.iter().map(|&j| self.rows[i][j]).collect()).collect(),
        }
    }
}

/// `d = 1 - s` for every entry.
pub fn distance_matrix(sim: &SimilarityMatrix) -> DistanceMatrix<SmellId> {
    DistanceMatrix {
        labels: sim.ids.clone(),
        rows: sim.entries.iter().map(|row| row.iter().map(|&s| 1.0 - f64::from(s)).collect()).collect(),
    }
}

/// One merge. Node ids `0..n` are leaves; the merge at position `k`
/// creates node `n + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    #[serde(rename = "a")]
    pub left: usize,
    #[serde(rename = "b")]
    pub right: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram<L = SmellId> {
    pub leaves: Vec<L>,
    pub merges: Vec<Merge>,
}

struct Active {
    node: usize,
    members: Vec<usize>,
}

impl Active {
    fn min_leaf(&self) -> usize {
        self.members[0]
    }
}

fn linkage_distance<L>(d: &DistanceMatrix<L>, a: &Active, b: &Active, linkage: Linkage) -> f64 {
    let pairs = a.members.iter().flat_map(|&i| b.members.iter().map(move |&j| d.rows[i][j]));
    match linkage {
        Linkage::Single => pairs.fold(f64::INFINITY, f64::min),
        Linkage::Complete => pairs.fold(0.0, f64::max),
        Linkage::Average => {
            let sum: f64 = pairs.sum();
            sum / (a.members.len() * b.members.len()) as f64
        }
    }
}

pub fn agglomerate<L: Clone>(distances: &DistanceMatrix<L>, linkage: Linkage) -> Dendrogram<L> {
    let n = distances.len();
    let mut active: Vec<Active> = (0..n).map(|i| Active { node: i, members: alloc::vec![i] }).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    while active.len() > 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for x in 0..active.len() {
            for y in x + 1..active.len() {
                let dist = linkage_distance(distances, &active[x], &active[y], linkage);
                let (lo, hi) = {
                    let (p, q) = (active[x].min_leaf(), active[y].min_leaf());
                    (p.min(q), p.max(q))
                };
                let better = match best {
                    None => true,
                    Some((bd, key, _, _)) => dist < bd || (dist == bd && (lo, hi) < key),
                };
                if better {
                    best = Some((dist, (lo, hi), x, y));
                }
            }
        }
        let (dist, _, x, y) = best.expect("at least two active clusters");
        // y > x, so removing y first keeps x valid
        let b = active.remove(y);
        let a = active.remove(x);
        let (first, second) = if a.min_leaf() <= b.min_leaf() { (a, b) } else { (b, a) };
        merges.push(Merge { left: first.node, right: second.node, distance: dist });
        let mut members = first.members;
        members.extend(second.members);
        members.sort_unstable();
        active.push(Active { node: n + merges.len() - 1, members });
    }
    Dendrogram { leaves: distances.labels.clone(), merges }
}

/// Cluster labels, contiguous from 1, one per leaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment<L = SmellId> {
    /// (leaf, cluster label) in leaf order.
    pub assignments: Vec<(L, usize)>,
    pub num_clusters: usize,
}

impl<L: PartialEq> ClusterAssignment<L> {
    pub fn label_of(&self, leaf: &L) -> Option<usize> {
        self.assignments.iter().find(|(l, _)| l == leaf).map(|(_, c)| *c)
    }

    /// Leaves of cluster `label`, in leaf order.
    pub fn members(&self, label: usize) -> Vec<&L> {
        self.assignments.iter().filter(|(_, c)| *c == label).map(|(l, _)| l).collect()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the merges whose distance is below `threshold`.
/// Components are numbered from 1 in order of their smallest leaf label.
pub fn cut<L: Clone + Ord>(dendrogram: &Dendrogram<L>, threshold: f64) -> ClusterAssignment<L> {
    let n = dendrogram.leaves.len();
    let mut parent: Vec<usize> = (0..n).collect();
    // representative leaf of each node
    let mut rep: Vec<usize> = (0..n).collect();
    for m in &dendrogram.merges {
        let (a, b) = (rep[m.left], rep[m.right]);
        if m.distance < threshold {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[rb] = ra;
        }
        rep.push(a);
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut groups: Vec<(L, usize)> = Vec::new(); // (smallest label, root)
    for (i, &r) in roots.iter().enumerate() {
        let leaf = &dendrogram.leaves[i];
        match groups.iter_mut().find(|(_, root)| *root == r) {
            Some(g) => {
                if *leaf < g.0 {
                    g.0 = leaf.clone();
                }
            }
            None => groups.push((leaf.clone(), r)),
        }
    }
    groups.sort_by(|a, b| a.0.cmp(&b.0));
    let label = |r: usize| groups.iter().position(|(_, root)| *root == r).expect("root has a group") + 1;
    ClusterAssignment {
        assignments: dendrogram.leaves.iter().cloned().zip(roots.iter().map(|&r| label(r))).collect(),
        num_clusters: groups.len(),
    }
}

/// Distance at which categories are cut. Distances are 0 or 1, so any value
/// strictly between works.
pub const CATEGORY_THRESHOLD: f64 = 0.5;

/// Category labels for a catalog using the default (average) linkage.
pub fn categorize(catalog: &Catalog) -> ClusterAssignment<SmellId> {
    categorize_with(catalog, Linkage::default())
}

/// Clusters the catalog at [`CATEGORY_THRESHOLD`] and numbers clusters so
/// that the one holding SS3 comes first, then SS1, then SS5, then the rest
/// by smallest member. Numbers stay contiguous when an anchor is missing.
pub fn categorize_with(catalog: &Catalog, linkage: Linkage) -> ClusterAssignment<SmellId> {
    let dendrogram = agglomerate(&distance_matrix(&similarity_matrix(catalog)), linkage);
    let raw = cut(&dendrogram, CATEGORY_THRESHOLD);
    let mut order: Vec<usize> = Vec::new();
    for anchor in [SmellId::SS3, SmellId::SS1, SmellId::SS5] {
        if let Some(c) = raw.label_of(&anchor) {
            if !order.contains(&c) {
                order.push(c);
            }
        }
    }
    // raw labels already follow smallest-member order
    for c in 1..=raw.num_clusters {
        if !order.contains(&c) {
            order.push(c);
        }
    }
    ClusterAssignment {
        assignments: raw
            .assignments
            .iter()
            .map(|(id, c)| (*id, order.iter().position(|x| x == c).expect("label present") + 1))
            .collect(),
        num_clusters: raw.num_clusters,
    }
}
