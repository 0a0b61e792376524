use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;
use std::sync::Arc;

use coarselab::hyperbolic::h2_distance;
use coarselab::spaces::{bfs_distances, build_comb, build_product, generate_net, Model, SpaceGraph, Window};
use proptest::prelude::*;

/// Ball sizes about `start` by plain BFS over an implicit graph.
fn bfs_counts<T: Clone + Eq + Hash>(start: T, r_max: usize, nbrs: impl Fn(&T) -> Vec<T>) -> Vec<usize> {
    let mut dist: HashMap<T, usize> = HashMap::from([(start.clone(), 0)]);
    let mut q = VecDeque::from([start]);
    while let Some(u) = q.pop_front() {
        let du = dist[&u];
        if du == r_max {
            continue;
        }
        for v in nbrs(&u) {
            if !dist.contains_key(&v) {
                dist.insert(v.clone(), du + 1);
                q.push_back(v);
            }
        }
    }
    (0..=r_max).map(|r| dist.values().filter(|&&d| d <= r).count()).collect()
}

/// Reduced words over {0, 1, 2}.
fn tree_nbrs(w: &Vec<u8>) -> Vec<Vec<u8>> {
    let w = w.as_slice();
    let mut out = Vec::new();
    if !w.is_empty() {
        out.push(w[..w.len() - 1].to_vec());
    }
    for c in 0..3u8 {
        if w.last() != Some(&c) {
            let mut v = w.to_vec();
            v.push(c);
            out.push(v);
        }
    }
    out
}

fn plane(radius: f64, sep: f64) -> SpaceGraph {
    generate_net(
        Model::H(2),
        &Window::HyperbolicBall {
            center: vec![0.0, 1.0],
            radius,
        },
        sep,
        2.0 * sep,
    )
    .unwrap()
}

fn line(lo: i64, hi: i64) -> SpaceGraph {
    generate_net(Model::Z, &Window::Interval { lo, hi }, 1.0, 1.0).unwrap()
}

fn tree(radius: u32) -> SpaceGraph {
    generate_net(Model::T3, &Window::TreeBall { radius }, 1.0, 1.0).unwrap()
}

fn ball_sizes(s: &SpaceGraph, center: usize, r_max: u32) -> Vec<usize> {
    (0..=r_max).map(|r| s.bfs_ball(center, r, None).len()).collect()
}

#[test]
fn integer_window_is_a_path() {
    let z = line(-5, 5);
    assert_eq!(z.len(), 11);
    assert_eq!(z.edges().len(), 10);
    assert_eq!(z.degree_histogram(), vec![0, 2, 9]);
}

#[test]
fn tree_ball_sizes_match_bfs() {
    for n in 1..=7u32 {
        let t = tree(n);
        let oracle = bfs_counts(Vec::<u8>::new(), n as usize, tree_nbrs);
        assert_eq!(t.len(), oracle[n as usize]);
        assert_eq!(t.len(), 3 * (1 << n) - 2);
        assert_eq!(ball_sizes(&t, t.basepoint(), n), oracle);
    }
}

#[test]
fn plane_count_is_comparable_to_area() {
    let s = plane(8.0, 1.0);
    let reference = 8f64.cosh() - 1.0;
    let ratio = s.len() as f64 / reference;
    assert!((0.25..=4.0).contains(&ratio), "{} points, ratio {ratio}", s.len());
    let bound = (0..s.len()).map(|i| s.neighbors(i).len()).max().unwrap();
    assert_eq!(bound, s.degree_histogram().len() - 1);
}

#[test]
fn half_plane_distances() {
    assert!((h2_distance(0.0, 1.0, 0.0, std::f64::consts::E) - 1.0).abs() < 1e-12);
    let expected = (1.5f64 + (1.5f64 * 1.5 - 1.0).sqrt()).ln();
    assert!((h2_distance(0.0, 1.0, 1.0, 1.0) - expected).abs() < 1e-12);
    assert!((expected - 0.96242).abs() < 1e-5);
    assert_eq!(h2_distance(0.3, 0.7, 0.3, 0.7), 0.0);
}

#[test]
fn comb_balls_match_bfs() {
    // C₂: base vertices (b, 0) on a line, a hair (b, o) at each.
    let extent = 12i64;
    let c = build_comb(2, extent as u32).unwrap();
    let oracle = bfs_counts((0i64, 0i64), 6, |&(b, o)| {
        let mut v = vec![];
        if o == 0 {
            v.extend([(b - 1, 0), (b + 1, 0)].into_iter().filter(|p| p.0.abs() <= extent));
        }
        if o > 0 {
            v.push((b, o - 1));
        }
        if o < extent {
            v.push((b, o + 1));
        }
        v
    });
    assert_eq!(ball_sizes(&c, c.basepoint(), 6), oracle);
    // Within half the extent the ball is (n + 1)².
    for (n, &k) in oracle.iter().enumerate() {
        assert_eq!(k, (n + 1) * (n + 1));
    }
    assert_eq!(oracle[4], 25);

    let c1 = build_comb(1, 9).unwrap();
    assert_eq!(c1.len(), 19);
    assert_eq!(ball_sizes(&c1, c1.basepoint(), 5), vec![1, 3, 5, 7, 9, 11]);
}

#[test]
fn product_balls() {
    let z = Arc::new(line(-10, 10));
    let p = build_product(&[z.clone(), z]).unwrap();
    let o = p.basepoint();
    for n in 0..=8 {
        assert_eq!(p.bfs_ball(o, n, None).len(), 2 * (n * n + n) as usize + 1);
    }

    let t = Arc::new(tree(4));
    let z = Arc::new(line(-6, 6));
    let p = build_product(&[t.clone(), z.clone()]).unwrap();
    let start = (t.basepoint(), z.basepoint());
    let oracle = bfs_counts(start, 6, |&(a, b)| {
        let mut v: Vec<(usize, usize)> = t.neighbors(a).into_iter().map(|x| (x, b)).collect();
        v.extend(z.neighbors(b).into_iter().map(|y| (a, y)));
        v
    });
    assert_eq!(ball_sizes(&p, p.basepoint(), 6), oracle);
}

#[test]
fn product_of_one_space_is_a_copy() {
    let t = Arc::new(tree(3));
    let p = build_product(std::slice::from_ref(&t)).unwrap();
    assert_eq!(p.len(), t.len());
    let e: HashSet<(usize, usize)> = p.edges().into_iter().collect();
    let f: HashSet<(usize, usize)> = t.edges().into_iter().collect();
    assert_eq!(e, f);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nets_are_separated(radius in 1.5f64..3.5, sep in 0.5f64..1.5) {
        let s = plane(radius, sep);
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                prop_assert!(s.dist(i, j) >= sep - 1e-9, "{i} {j} {}", s.dist(i, j));
            }
        }
    }

    #[test]
    fn graph_distance_controls_model_distance(seed in 0usize..10_000) {
        let s = plane(5.0, 1.0);
        let b = s.basepoint();
        let from = seed % s.len();
        let d = bfs_distances(&s, from, None);
        for (j, &g) in d.iter().enumerate() {
            prop_assert!(g != u32::MAX);
            prop_assert!(g as f64 * s.edge_threshold >= s.dist(from, j) - 1e-9);
            // Interior pairs: a coarse upper bound.
            if s.dist(b, from) < 3.0 && s.dist(b, j) < 3.0 {
                prop_assert!((g as f64) <= 4.0 * s.dist(from, j) + 4.0, "{from} {j} {g}");
            }
        }
    }

    #[test]
    fn balls_are_nested(center in 0usize..766, r in 0u32..7) {
        let t = tree(8);
        let small = t.bfs_ball(center, r, None);
        let big: HashSet<usize> = t.bfs_ball(center, r + 1, None).into_iter().collect();
        prop_assert!(small.len() <= big.len());
        prop_assert!(small.iter().all(|x| big.contains(x)));
    }

    #[test]
    fn product_distance_is_the_sum(a in 0usize..46, b in 0usize..46, x in 0usize..15, y in 0usize..15) {
        let t = Arc::new(tree(4));
        let z = Arc::new(line(-7, 7));
        let p = build_product(&[t.clone(), z.clone()]).unwrap();
        let (u, v) = (p.tuple_index(&[a, x]), p.tuple_index(&[b, y]));
        prop_assert_eq!(p.dist(u, v), t.dist(a, b) + z.dist(x, y));
    }
}
