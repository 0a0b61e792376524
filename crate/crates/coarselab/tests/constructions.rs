use std::sync::Arc;

use coarselab::analysis::{ball_growth, distortion_profile, fit_growth, DistortionOptions};
use coarselab::constructions::tiling::Locator;
use coarselab::constructions::walk::address_distance;
use coarselab::constructions::{
    build_comb, build_h2_tiling, hd_cover, nerve_map, tiling_to_decomposition, tree_walk_window, DComb, HdCoverParams,
    Spine, TileKind, TilingWindow, WalkVertex,
};
use coarselab::covers::{ball_cover, Cover};
use coarselab::spaces::{generate_net, Model, Window};
use proptest::prelude::*;

fn window(radius: f64) -> TilingWindow {
    TilingWindow {
        center: (0.0, 1.0),
        radius,
        resolution: (-radius).exp(),
    }
}

#[test]
fn tiling_constants() {
    let t = build_h2_tiling(1.0, window(2.0)).unwrap();
    for k in 0..5 {
        assert!((t.lambda[k] - (k as f64).sinh()).abs() < 1e-12);
    }
    assert!((t.dilation - 1.076022).abs() < 1e-6);
    // S₀ is tangent to x = λ₄ y: centre-to-line distance equals its radius.
    let (c, rad) = ((1.0 + t.dilation) / 2.0, (t.dilation - 1.0) / 2.0);
    let l4 = t.lambda[4];
    assert!((c / (1.0 + l4 * l4).sqrt() - rad).abs() < 1e-9);
}

#[test]
fn depth_one_frames_match_semicircle_enumeration() {
    for radius in [2.0, 4.0, 6.0] {
        let w = window(radius);
        let t = build_h2_tiling(1.0, w.clone()).unwrap();
        let x = t.dilation;
        let (wc, wr) = (radius.cosh(), radius.sinh());
        let expected = (-2000..2000)
            .filter(|&n| {
                let rad = x.powi(n) * (x - 1.0) / 2.0;
                let mid = x.powi(n) * (x + 1.0) / 2.0;
                rad >= w.resolution && (mid * mid + wc * wc).sqrt() < rad + wr
            })
            .count();
        let got = t
            .tiles
            .iter()
            .filter(|tile| tile.depth == 1 && tile.key.kind == TileKind::A)
            .count();
        assert_eq!(got, 2 * expected, "radius {radius}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn a_tile_holds_the_middle_band(off in -0.999f64..0.999, logy in -3.0f64..3.0, left in any::<bool>()) {
        // The equidistant x = λ₂y lies at distance 2r from the y-axis, and
        // its open r-neighbourhood is the band arsinh(x/y) ∈ (r, 3r).
        let r = 1.0;
        let loc = Locator::new(r).unwrap();
        let y = logy.exp();
        let sign = if left { -1.0 } else { 1.0 };
        let x = sign * y * (2.0 * r + off * r).sinh();
        let key = loc.locate(x, y).unwrap();
        prop_assert_eq!(key.kind, TileKind::A);
        prop_assert_eq!(key.depth(), 0);
    }

    #[test]
    fn the_inner_band_is_the_root_tile(frac in 0.0f64..0.999, logy in -3.0f64..3.0, left in any::<bool>()) {
        let loc = Locator::new(1.0).unwrap();
        let y = logy.exp();
        let sign = if left { -1.0 } else { 1.0 };
        let key = loc.locate(sign * y * frac.sinh(), y).unwrap();
        prop_assert_eq!(key.kind, TileKind::B1);
        prop_assert!(key.path.is_empty());
    }
}

#[test]
fn tiling_decomposition_colours_follow_kinds() {
    let net = generate_net(
        Model::H(2),
        &Window::HyperbolicBall {
            center: vec![0.0, 1.0],
            radius: 5.0,
        },
        0.5,
        1.0,
    )
    .unwrap();
    let t = build_h2_tiling(1.0, window(5.0)).unwrap();
    let dec = tiling_to_decomposition(&t, &net).unwrap();
    assert!(dec.partition);
    assert_eq!(dec.colours(), 2);
    assert_eq!(dec.pieces.iter().map(Vec::len).sum::<usize>(), net.len());
    for (k, label) in dec.labels.iter().enumerate() {
        let want = if label.starts_with("A:") { 0 } else { 1 };
        assert_eq!(dec.colour[k], want, "{label}");
    }
}

#[test]
fn walk_is_bounded_to_one_and_anchored_logarithmic() {
    let w = tree_walk_window(3000).unwrap();
    assert!(w.map.measured_max_fiber <= 3);
    assert!(w.map.non_adjacent_edges().is_empty());
    let anchored = w.anchored_distances();
    let b = w.half_width as i64;
    for (i, &d) in anchored.iter().enumerate() {
        let n = (i as i64 - b).unsigned_abs().max(1) as f64;
        assert!(d as f64 <= 2.0 * n.log2() + 6.0, "n = {}, d = {d}", i as i64 - b);
    }
    // Address arithmetic agrees with the target graph.
    let o = w.map.assignment[b as usize];
    for n in (-b..=b).step_by(97) {
        let t = w.map.assignment[(n + b) as usize];
        assert_eq!(w.map.target.dist(o, t) as u64, anchored[(n + b) as usize]);
    }
    assert_eq!(address_distance(&WalkVertex::root(0), w.image(0)), 0);
}

#[test]
fn walk_fibres_are_witnessed() {
    let w = tree_walk_window(500).unwrap();
    let fibers = w.map.fibers();
    assert_eq!(fibers.values().copied().max().unwrap(), w.map.measured_max_fiber);
    assert_eq!(fibers.values().sum::<usize>(), w.map.source.len());
}

#[test]
fn brady_farb_map_is_coarsely_lipschitz() {
    let c = hd_cover(&HdCoverParams::new(3, 3.0, 1.0)).unwrap();
    let f = c.map.expect("d = 3 has a map");
    let prof = distortion_profile(
        &f,
        &DistortionOptions {
            pair_cap: 20_000,
            seed: 3,
            anchor: None,
        },
    );
    // Each coordinate projection is 1-Lipschitz; snapping moves each end by
    // at most twice the factor separation.
    for b in &prof.buckets {
        assert!(b.max <= 2.0 * b.hi + 4.0, "{b:?}");
    }
    assert!(f.measured_lipschitz.is_finite());
    assert_eq!(c.decomposition.colours(), 3);
    assert_eq!(c.factor_decomposition.colours(), 3);
}

#[test]
fn combs_grow_polynomially() {
    let c1 = build_comb(1, 30).unwrap();
    let g1 = ball_growth(&c1, c1.basepoint(), Some(20));
    assert_eq!(g1.counts[..4], [1, 3, 5, 7]);

    let c2 = build_comb(2, 30).unwrap();
    let g2 = ball_growth(&c2, c2.basepoint(), Some(15));
    for (r, &k) in g2.counts.iter().enumerate() {
        assert_eq!(k, ((r + 1) * (r + 1)) as u64);
    }

    let c3 = build_comb(3, 40).unwrap();
    let g3 = ball_growth(&c3, c3.basepoint(), Some(20));
    let fit = fit_growth(&g3, 5).unwrap();
    assert!((2.6..=3.4).contains(&fit.exponent), "{fit:?}");
}

#[test]
fn comb_level_sets_obey_the_bound() {
    for spine in [
        Spine::Vertical { x0: 0.0 },
        Spine::Semicircle {
            center: 0.0,
            radius: 50.0,
        },
    ] {
        for spacing in [0.5, 1.0, 2.5] {
            let comb = DComb::new(spine, spacing, 0.3).unwrap();
            let a = 1.0;
            let levels = comb.critical_levels(a + 2.0, 8.0, 40);
            let counts = comb.check_levels(a, &levels);
            assert!(!counts.is_empty());
            assert!(counts.iter().all(|c| c.holds()), "{spine:?} D = {spacing}");
        }
    }
}

#[test]
fn nerve_coordinates_form_a_partition_of_unity() {
    let s = generate_net(
        Model::H(2),
        &Window::HyperbolicBall {
            center: vec![0.0, 1.0],
            radius: 4.0,
        },
        0.5,
        1.0,
    )
    .unwrap();
    let cover: Cover = ball_cover(&s, 1.5);
    let nerve = nerve_map(&s, &cover).unwrap();
    assert!(nerve.check(&s, &cover).is_empty());
    for coord in &nerve.coordinates {
        let total: f64 = coord.iter().map(|c| c.1).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(coord.iter().all(|c| c.1 >= 0.0));
    }
    assert!(nerve.lipschitz(&s).is_finite());
}

#[test]
fn tiles_cover_a_window_without_overlap() {
    let net = Arc::new(
        generate_net(
            Model::H(2),
            &Window::HyperbolicBall {
                center: vec![0.0, 1.0],
                radius: 4.0,
            },
            0.5,
            1.0,
        )
        .unwrap(),
    );
    let t = build_h2_tiling(1.0, window(4.0)).unwrap();
    let dec = tiling_to_decomposition(&t, &net).unwrap();
    let listed: std::collections::HashSet<String> = t.tiles.iter().map(|tile| tile.key.label()).collect();
    for label in &dec.labels {
        assert!(listed.contains(label), "{label} missing from the tile list");
    }
}
