use proptest::prelude::*;
use tfsmell_core::catalog::{catalog, similarity, similarity_matrix, AttributeVector, Catalog, CatalogEntry, Category};
use tfsmell_core::cluster::{agglomerate, categorize, categorize_with, cut, distance_matrix, DistanceMatrix, Linkage};
use tfsmell_core::SmellId;

/// The published 7x7 similarity matrix, typed in row by row.
const PUBLISHED: [[u8; 7]; 7] = [
    [1, 1, 0, 0, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 1, 1],
    [0, 0, 1, 1, 0, 1, 1],
    [0, 0, 0, 0, 1, 0, 0],
    [0, 0, 1, 1, 0, 1, 1],
    [0, 0, 1, 1, 0, 1, 1],
];

/// Rows of the published attribute table.
const ATTRIBUTES: [[bool; 4]; 7] = [
    [true, true, false, false],
    [true, true, false, false],
    [false, false, false, true],
    [false, false, false, true],
    [false, false, true, false],
    [false, false, false, true],
    [false, false, false, true],
];

fn oracle_similarity(a: [bool; 4], b: [bool; 4]) -> u8 {
    (0..4).all(|i| a[i] == b[i]) as u8
}

#[test]
fn attribute_vectors_match_the_table() {
    for (i, d) in catalog().descriptors().iter().enumerate() {
        assert_eq!(d.attributes.to_array(), ATTRIBUTES[i], "{}", d.id);
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn similarity_matrix_matches_published_entries() {
    let m = similarity_matrix(&catalog());
    let mut checked = 0;
    for i in 0..7 {
        assert_eq!(m.entries[i][i], 1);
        for j in (i + 1)..7 {
            assert_eq!(m.entries[i][j], PUBLISHED[i][j], "({i},{j})");
            assert_eq!(m.entries[j][i], PUBLISHED[j][i], "({j},{i})");
            checked += 1;
        }
    }
    assert_eq!(checked, 21);
}

#[test]
fn similarity_examples() {
    let c = catalog();
    let v = |id: SmellId| c.get(id).unwrap().attributes;
    assert_eq!(similarity(v(SmellId::SS1), v(SmellId::SS2)), 1);
    assert_eq!(similarity(v(SmellId::SS1), v(SmellId::SS1)), 1);
    assert_eq!(similarity(v(SmellId::SS5), v(SmellId::SS6)), 0);
}

#[test]
fn similarity_is_an_equivalence() {
    let c = catalog();
    let vs: Vec<AttributeVector> = c.descriptors().iter().map(|d| d.attributes).collect();
    for a in &vs {
        assert_eq!(similarity(*a, *a), 1);
        for b in &vs {
            assert_eq!(similarity(*a, *b), similarity(*b, *a));
            for c in &vs {
                if similarity(*a, *b) == 1 && similarity(*b, *c) == 1 {
                    assert_eq!(similarity(*a, *c), 1);
                }
            }
        }
    }
}

#[test]
fn permuted_catalog_permutes_the_matrix() {
    let base = catalog();
    let order = [6, 2, 4, 0, 5, 1, 3];
    let p = base.permuted(&order);
    let m = similarity_matrix(&p);
    for i in 0..7 {
        for j in 0..7 {
            assert_eq!(m.entries[i][j], oracle_similarity(ATTRIBUTES[order[i]], ATTRIBUTES[order[j]]));
        }
    }
}

#[test]
fn distances_from_similarity() {
    let d = distance_matrix(&similarity_matrix(&catalog()));
    assert_eq!(d.get(0, 1), 0.0);
    for i in 0..7 {
        assert_eq!(d.get(i, i), 0.0);
        if i != 4 {
            assert_eq!(d.get(4, i), 1.0);
        }
    }
}

#[test]
fn categories_for_every_linkage() {
    let c = catalog();
    let expected = [2, 2, 1, 1, 3, 1, 1];
    for linkage in Linkage::ALL {
        let a = categorize_with(&c, linkage);
        assert_eq!(a.num_clusters, 3);
        for (i, id) in SmellId::ALL.iter().enumerate() {
            assert_eq!(a.label_of(id), Some(expected[i]), "{id} under {linkage:?}");
        }
    }
    for d in c.descriptors() {
        assert_eq!(Category(categorize(&c).label_of(&d.id).unwrap() as u32), d.category);
    }
}

#[test]
fn merge_order_on_canonical_distances() {
    let d = distance_matrix(&similarity_matrix(&catalog()));
    for linkage in Linkage::ALL {
        let dg = agglomerate(&d, linkage);
        assert_eq!(dg.merges.len(), 6);
        let zero: Vec<_> = dg.merges.iter().filter(|m| m.distance == 0.0).collect();
        assert_eq!(zero.len(), 4);
        assert!(dg.merges[4..].iter().all(|m| m.distance == 1.0));
        assert_eq!(cut(&dg, 0.0).num_clusters, 7);
        assert_eq!(cut(&dg, 1.5).num_clusters, 1);
    }
}

#[test]
fn degenerate_catalogs() {
    let one = Catalog::from_entries(vec![catalog().to_entries().remove(4)]).unwrap();
    assert_eq!(categorize(&one).num_clusters, 1);

    let same: Vec<CatalogEntry> =
        catalog().to_entries().into_iter().map(|e| CatalogEntry { attributes: [true, false, true, false], ..e }).collect();
    let a = categorize(&Catalog::from_entries(same).unwrap());
    assert_eq!(a.num_clusters, 1);

    let d = DistanceMatrix::new(vec!["x"], vec![vec![0.0]]).unwrap();
    assert!(agglomerate(&d, Linkage::Average).merges.is_empty());
}

#[test]
fn all_distinct_vectors_merge_at_one() {
    let labels: Vec<usize> = (0..7).collect();
    let rows = (0..7).map(|i| (0..7).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
    let d = DistanceMatrix::new(labels, rows).unwrap();
    for linkage in Linkage::ALL {
        assert!(agglomerate(&d, linkage).merges.iter().all(|m| m.distance == 1.0));
    }
}

fn random_distances() -> impl Strategy<Value = DistanceMatrix<usize>> {
    (1usize..9).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), 4), n).prop_map(move |vecs| {
            let rows = (0..n)
                .map(|i| (0..n).map(|j| if vecs[i] == vecs[j] { 0.0 } else { 1.0 }).collect())
                .collect();
            DistanceMatrix::new((0..n).collect(), rows).unwrap()
        })
    })
}

/// Canonical partition: sorted groups of leaf labels.
fn partition(a: &tfsmell_core::cluster::ClusterAssignment<usize>) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = (1..=a.num_clusters).map(|c| a.members(c).into_iter().copied().collect()).collect();
    for g in &mut groups {
        g.sort();
    }
    groups.sort();
    groups
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn half_cut_equals_vector_equality(d in random_distances()) {
        let n = d.len();
        // brute-force oracle: i and j share a cluster iff their distance is 0
        let mut expected: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            match expected.iter_mut().find(|g| d.get(g[0], i) == 0.0) {
                Some(g) => g.push(i),
                None => expected.push(vec![i]),
            }
        }
        expected.sort();
        for linkage in Linkage::ALL {
            let dg = agglomerate(&d, linkage);
            prop_assert_eq!(dg.merges.len(), n - 1);
            prop_assert!(dg.merges.windows(2).all(|w| w[0].distance <= w[1].distance));
            let a = cut(&dg, 0.5);
            prop_assert_eq!(partition(&a), expected.clone());
            prop_assert_eq!(cut(&dg, 0.0).num_clusters, n);
            prop_assert_eq!(cut(&dg, 1.5).num_clusters, 1);
            let labels: Vec<usize> = a.assignments.iter().map(|(_, c)| *c).collect();
            prop_assert!((1..=a.num_clusters).all(|c| labels.contains(&c)));
        }
    }

    #[test]
    fn leaf_order_does_not_change_clusters(d in random_distances(), seed in any::<u64>()) {
        let n = d.len();
        let mut order: Vec<usize> = (0..n).collect();
        tfsmell_core::sample::shuffle(&mut order, seed);
        let p = d.permuted(&order);
        for linkage in Linkage::ALL {
            let base = partition(&cut(&agglomerate(&d, linkage), 0.5));
            let moved = partition(&cut(&agglomerate(&p, linkage), 0.5));
            prop_assert_eq!(base, moved);
        }
    }
}
