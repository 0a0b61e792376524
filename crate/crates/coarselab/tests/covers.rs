use std::collections::BTreeSet;
use std::sync::Arc;

use coarselab::constructions::{MapRecord, Provenance};
use coarselab::covers::{
    check_disjointness, connected_components, greedy_decomposition, iterated_neighborhood, kolmogorov_amplify,
    product_decomposition, pullback_cover, r_multiplicity, refine_connected, ColoredDecomposition, Cover, Metric,
};
use coarselab::spaces::{build_product, generate_net, Model, SpaceGraph, Window};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn path(n: i64) -> SpaceGraph {
    generate_net(Model::Z, &Window::Interval { lo: 0, hi: n - 1 }, 1.0, 1.0).unwrap()
}

fn intervals(n: usize, len: usize) -> Vec<Vec<u32>> {
    (0..n as u32).collect::<Vec<_>>().chunks(len).map(|c| c.to_vec()).collect()
}

/// Blocks of `len` points with colours cycling through `0..colours`.
fn blocks(n: usize, len: usize, colours: u32, r: f64) -> ColoredDecomposition {
    let pieces = intervals(n, len);
    let colour = (0..pieces.len() as u32).map(|k| k % colours).collect();
    ColoredDecomposition::new(pieces, colour, r)
}

fn random_connected(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> SpaceGraph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..extra {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    SpaceGraph::from_edges(n, &edges).unwrap()
}

fn covered(n: usize, pieces: &[Vec<u32>]) -> bool {
    let mut seen = vec![false; n];
    pieces.iter().flatten().for_each(|&x| seen[x as usize] = true);
    seen.into_iter().all(|s| s)
}

#[test]
fn singleton_multiplicity() {
    let s = path(20);
    let cover = Cover::new((0..20).map(|x| vec![x]).collect());
    assert_eq!(r_multiplicity(&s, &cover, 0.0, Metric::Graph).value, 1);
    assert_eq!(r_multiplicity(&s, &cover, 1.0, Metric::Graph).value, 3);
    assert_eq!(r_multiplicity(&s, &cover, 1.0, Metric::Model).value, 3);
    assert_eq!(r_multiplicity(&s, &cover, 2.5, Metric::Model).value, 5);
    let even_odd = Cover::new(vec![(0..20).step_by(2).collect(), (1..20).step_by(2).collect()]);
    assert_eq!(r_multiplicity(&s, &even_odd, 0.0, Metric::Graph).value, 1);
    assert_eq!(r_multiplicity(&s, &even_odd, 1.0, Metric::Graph).value, 2);
}

#[test]
fn disjointness_threshold_is_strict() {
    let s = path(9);
    let pieces = vec![vec![0, 1, 2, 3], vec![5, 6, 7, 8], vec![4]];
    let ok = ColoredDecomposition::new(pieces.clone(), vec![0, 0, 1], 2.0);
    assert!(check_disjointness(&s, &ok).is_empty());
    let bad = ColoredDecomposition::new(pieces, vec![0, 0, 1], 3.0);
    let v = check_disjointness(&s, &bad);
    assert_eq!(v.len(), 1);
    assert_eq!((v[0].a, v[0].b, v[0].distance), (0, 1, 2.0));
    assert_eq!(v[0].points, (3, 5));
}

#[test]
fn neighborhoods_match_a_direct_computation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s = random_connected(40, 10, &mut rng);
    let pieces: Vec<Vec<u32>> = (0..8u32).map(|k| (0..40).filter(|x| x % 8 == k).collect()).collect();
    let chain = iterated_neighborhood(&s, &pieces, 0, 1.0, 3);
    let mut level: BTreeSet<u32> = pieces[0].iter().copied().collect();
    assert_eq!(chain.levels[0], level.iter().copied().collect::<Vec<_>>());
    for m in 1..chain.levels.len() {
        let near: Vec<usize> = (0..40).filter(|&y| level.iter().any(|&x| s.dist(x as usize, y) <= 1.0)).collect();
        for p in &pieces {
            if p.iter().any(|x| near.contains(&(*x as usize))) {
                level.extend(p.iter().copied());
            }
        }
        assert_eq!(chain.levels[m], level.iter().copied().collect::<Vec<_>>(), "level {m}");
    }
}

#[test]
fn neighborhoods_of_intervals_grow_linearly() {
    let s = path(101);
    let pieces = intervals(101, 5);
    let chain = iterated_neighborhood(&s, &pieces, 10, 1.0, 4);
    let sizes: Vec<usize> = chain.levels.iter().map(|l| l.len()).collect();
    assert_eq!(sizes, vec![5, 15, 25, 35, 45]);
    assert_eq!(chain.level_pieces[1].len(), 3);
}

#[test]
fn greedy_decomposition_of_overlapping_intervals() {
    let s = path(41);
    let cover = Cover::new((0..20).map(|k| vec![2 * k, 2 * k + 1, 2 * k + 2]).collect());
    assert_eq!(r_multiplicity(&s, &cover, 2.0, Metric::Model).value, 4);
    assert!(greedy_decomposition(&s, &cover, 1.0, 2).is_err());
    let dec = greedy_decomposition(&s, &cover, 1.0, 3).unwrap();
    assert!(dec.colours() <= 4);
    assert!(covered(41, &dec.pieces));
    assert!(check_disjointness(&s, &dec).is_empty());
}

#[test]
fn amplification_adds_a_colour() {
    let s = path(20);
    let dec = blocks(20, 5, 2, 3.0);
    assert!(check_disjointness(&s, &dec).is_empty());
    let amp = kolmogorov_amplify(&s, &dec, 1).unwrap();
    assert_eq!(amp.colours(), 3);
    assert!((amp.r - 1.0).abs() < 1e-12);
    assert!(amp.coverage_counts(20).iter().all(|&c| c >= 2));
    assert!(check_disjointness(&s, &amp).is_empty());
    assert!(kolmogorov_amplify(&s, &dec, 2).is_err());
}

#[test]
fn product_of_amplified_lines_covers_the_plane() {
    let z = Arc::new(path(21));
    let base = blocks(21, 5, 2, 3.0);
    let amp = kolmogorov_amplify(&z, &base, 1).unwrap();
    let plane = build_product(&[z.clone(), z]).unwrap();
    let dec = product_decomposition(&amp, &amp, &plane).unwrap();
    assert_eq!(dec.colours(), 3);
    assert!(covered(plane.len(), &dec.pieces));
    assert!(check_disjointness(&plane, &dec).is_empty());
}

#[test]
fn pullback_along_identity_and_constant_maps() {
    let s = Arc::new(path(12));
    let cover = Cover::new(vec![vec![0, 1, 2, 3, 4], vec![4, 5, 6, 7], vec![7, 8, 9, 10, 11]]);
    let id = MapRecord::new(s.clone(), s.clone(), (0..12).collect(), Provenance::new("identity")).unwrap();
    assert_eq!(pullback_cover(&id, &cover).unwrap().pieces, cover.pieces);

    let c = MapRecord::new(s.clone(), s.clone(), vec![4; 12], Provenance::new("constant")).unwrap();
    let pulled = pullback_cover(&c, &cover).unwrap();
    let whole: Vec<u32> = (0..12).collect();
    assert_eq!(pulled.pieces, vec![whole.clone(), whole]);
    assert_eq!(c.measured_lipschitz, 0.0);
}

#[test]
fn refinement_splits_gaps() {
    let s = path(10);
    let cover = Cover::new(vec![vec![0, 1, 2, 5, 6], (0..10).collect()]);
    let fine = refine_connected(&s, &cover, 1.0);
    assert_eq!(fine.pieces, vec![vec![0, 1, 2], vec![5, 6], (0..10).collect()]);
    let coarse = refine_connected(&s, &cover, 3.0);
    assert_eq!(coarse.pieces.len(), 2);
}

#[test]
fn components_match_label_propagation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let s = random_connected(30, 8, &mut rng);
        let piece: Vec<u32> = (0..30).filter(|_| rng.gen_bool(0.4)).collect();
        let comps = connected_components(&s, &piece, 2.0);
        let mut label: Vec<usize> = (0..piece.len()).collect();
        // Propagate minimum labels until stable.
        loop {
            let mut changed = false;
            for i in 0..piece.len() {
                for j in 0..piece.len() {
                    if s.dist(piece[i] as usize, piece[j] as usize) <= 2.0 && label[j] < label[i] {
                        label[i] = label[j];
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let distinct: BTreeSet<usize> = label.iter().copied().collect();
        assert_eq!(comps.len(), distinct.len());
        for c in &comps {
            let l = label[piece.iter().position(|x| x == &c[0]).unwrap()];
            for x in c {
                assert_eq!(label[piece.iter().position(|y| y == x).unwrap()], l);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pullback_multiplicity_is_controlled(
        steps in prop::collection::vec(-1i64..=1, 30),
        cuts in prop::collection::btree_set(1u32..15, 1..6),
        radius in 0u32..4,
    ) {
        let source = Arc::new(path(31));
        let target = Arc::new(path(16));
        let mut pos = 7i64;
        let mut assignment = vec![pos as usize];
        for st in steps {
            pos = (pos + st).clamp(0, 15);
            assignment.push(pos as usize);
        }
        let f = MapRecord::new(source.clone(), target.clone(), assignment, Provenance::new("walk")).unwrap();
        let mut bounds: Vec<u32> = vec![0];
        bounds.extend(cuts);
        bounds.push(16);
        // Overlapping intervals: each piece reaches one past its cut.
        let pieces: Vec<Vec<u32>> = bounds.windows(2).map(|w| (w[0]..(w[1] + 1).min(16)).collect()).collect();
        let cover = Cover::new(pieces);
        let pulled = pullback_cover(&f, &cover).unwrap();
        let c = f.measured_lipschitz;
        prop_assert!(c <= 1.0);
        let src = r_multiplicity(&source, &pulled, radius as f64, Metric::Graph).value;
        let tgt = r_multiplicity(&target, &cover, (c * radius as f64).ceil(), Metric::Graph).value;
        prop_assert!(src <= tgt, "{src} > {tgt}");
    }

    #[test]
    fn neighborhood_levels_are_nested(lens in prop::collection::vec(1usize..6, 4..20), s in 1.0f64..3.0, base in 0usize..4) {
        let n: usize = lens.iter().sum();
        let space = path(n as i64);
        let mut pieces = Vec::new();
        let mut at = 0u32;
        for l in lens {
            pieces.push((at..at + l as u32).collect::<Vec<_>>());
            at += l as u32;
        }
        let chain = iterated_neighborhood(&space, &pieces, base, s, 4);
        for w in chain.levels.windows(2) {
            let big: BTreeSet<u32> = w[1].iter().copied().collect();
            prop_assert!(w[0].iter().all(|x| big.contains(x)));
        }
    }
}
