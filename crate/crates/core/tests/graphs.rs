use itertools::Itertools;
use trofey_core::graph::{automorphism_count, enumerate_graphs, is_valid, isomorphic, AutMode, FeynmanGraph, GenusFunction, KVector};

fn k(v: &[u32]) -> KVector {
    KVector::new(v.to_vec()).unwrap()
}

const KS: [&[u32]; 6] = [&[1, 1], &[2, 0, 0], &[1, 1, 1, 1], &[2, 2], &[3, 1], &[1, 1, 0, 0]];

#[test]
fn vertex_labeled_automorphisms_divide_unlabeled() {
    for kv in KS {
        for (g, gf) in enumerate_graphs(&k(kv)) {
            let labeled = automorphism_count(&g, &gf, AutMode::VertexLabeled);
            let unlabeled = automorphism_count(&g, &gf, AutMode::Unlabeled);
            assert_eq!(unlabeled % labeled, 0, "{g} {gf:?}");
        }
    }
}

#[test]
fn enumerated_classes_are_pairwise_distinct() {
    for kv in KS {
        let kk = k(kv);
        let classes = enumerate_graphs(&kk);
        for (i, a) in classes.iter().enumerate() {
            assert!(is_valid(&a.0, &a.1, &kk));
            for b in &classes[i + 1..] {
                assert!(!isomorphic(&kk, (&a.0, &a.1), (&b.0, &b.1)), "{} and {} for k={kv:?}", a.0, b.0);
            }
        }
    }
}

/// Every edge multiset on `n` vertices with the right edge count, every
/// genus function; keeps those passing validation and with no univalent vertex.
fn brute_force(kk: &KVector) -> Vec<(FeynmanGraph, GenusFunction)> {
    let n = kk.len();
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let genus_ranges = kk.powers().iter().map(|&ki| 0..=ki / 2 + 1).multi_cartesian_product();
    for gf in genus_ranges {
        let gf = GenusFunction(gf);
        let valencies: Option<Vec<i64>> = (0..n).map(|i| Some(kk.required_valency(i, gf.0[i])).filter(|&v| v >= 2)).collect();
        let Some(valencies) = valencies else { continue };
        let total: i64 = valencies.iter().sum();
        if total % 2 != 0 {
            continue;
        }
        for edges in slots.iter().copied().combinations_with_replacement((total / 2) as usize) {
            let mut sorted = edges.clone();
            sorted.sort_by_key(|&(u, v)| u != v);
            let g = FeynmanGraph::new(n, sorted).unwrap();
            if is_valid(&g, &gf, kk) {
                out.push((g, gf.clone()));
            }
        }
    }
    out
}

#[test]
fn every_labeled_graph_has_exactly_one_representative() {
    for kv in [&[1, 1][..], &[2, 0, 0], &[1, 1, 1, 1], &[3, 1], &[2, 2]] {
        let kk = k(kv);
        let classes = enumerate_graphs(&kk);
        let all = brute_force(&kk);
        assert!(!all.is_empty());
        for (g, gf) in &all {
            let hits = classes.iter().filter(|(c, cgf)| isomorphic(&kk, (g, gf), (c, cgf))).count();
            assert_eq!(hits, 1, "{g} {gf:?} for k={kv:?}");
        }
    }
}

#[test]
fn all_ones_gives_trivalent_genus_zero() {
    for n in [2, 4] {
        let kk = k(&vec![1; n]);
        let classes = enumerate_graphs(&kk);
        assert!(!classes.is_empty());
        for (g, gf) in classes {
            assert!(gf.is_zero());
            assert!((0..n).all(|v| g.valency(v) == 3), "{g}");
        }
    }
}

#[test]
fn genus_two_hurwitz_graphs() {
    let classes = enumerate_graphs(&k(&[1, 1]));
    assert_eq!(classes.len(), 2);
    let theta = FeynmanGraph::new(2, vec![(0, 1), (0, 1), (0, 1)]).unwrap();
    let dumbbell = FeynmanGraph::new(2, vec![(0, 0), (1, 1), (0, 1)]).unwrap();
    let kk = k(&[1, 1]);
    let zero = GenusFunction::zero(2);
    for g in [&theta, &dumbbell] {
        assert!(classes.iter().any(|(c, cgf)| isomorphic(&kk, (g, &zero), (c, cgf))));
    }
}
