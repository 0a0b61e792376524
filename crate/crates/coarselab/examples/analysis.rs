//! Window-scale statistics: growth fits, neighbourhood escalation on the
//! tiling, sublinearity of pulled-back covers and quasi-convexity.

use coarselab::analysis::{
    central_piece, diameter, escalation, fit_growth, quasi_convexity_defect, radial_sublinearity, subexp_stat,
    DefectOptions, GrowthReport,
};
use coarselab::constructions::tiling::tile_pieces;
use coarselab::constructions::{tree_walk_window, TileKind};
use coarselab::covers::{ball_cover, pullback_cover, refine_connected};
use coarselab::spaces::{generate_net, Model, Window};

fn main() -> coarselab::Result<()> {
    let cubes = GrowthReport::from_counts(0, (0..30u64).map(|r| r.pow(3)).collect(), vec![false; 30]);
    let exp2 = GrowthReport::from_counts(0, (0..30).map(|r| 1u64 << r).collect(), vec![false; 30]);
    println!(
        "n³ data: exponent {:.4}; 2ⁿ data: log-ratio {:.4} (log 2 = {:.4})",
        fit_growth(&cubes, 2)?.exponent,
        subexp_stat(&exp2)?.ratio,
        std::f64::consts::LN_2
    );

    let plane = generate_net(
        Model::H(2),
        &Window::HyperbolicBall {
            center: vec![0.0, 1.0],
            radius: 9.0,
        },
        0.5,
        1.0,
    )?;
    let (keys, dec) = tile_pieces(1.0, &plane)?;
    let base = central_piece(&plane, &dec.pieces, (0..dec.len()).filter(|&k| keys[k].kind == TileKind::B))
        .expect("a B piece");
    match escalation(&plane, &dec, base, 2.0, 2, 4) {
        Ok(rep) => println!("escalation from {}: exponents {:.3?}", keys[base].label(), rep.exponents()),
        Err(e) => println!("escalation: {e}"),
    }

    let walk = tree_walk_window(20_000)?;
    let f = &walk.map;
    for r in [2.0, 4.0] {
        let pulled = pullback_cover(f, &ball_cover(&f.target, r))?;
        let pieces = refine_connected(&f.source, &pulled, 1.0).pieces;
        let max = pieces.iter().map(|p| diameter(&f.source, p)).fold(0.0, f64::max);
        let rep = radial_sublinearity(&f.source, &pieces, f.source.basepoint(), &[64, 256, 1024, 4096]);
        println!("walk pullback of {r}-balls: max diameter {max}, ratios {:.4?}", rep.ratio);
    }

    let small = generate_net(
        Model::H(2),
        &Window::HyperbolicBall {
            center: vec![0.0, 1.0],
            radius: 7.0,
        },
        1.0,
        2.0,
    )?;
    for x in [5.0, 20.0, 80.0] {
        let band: Vec<u32> = (0..small.len())
            .filter(|&i| small.coords(i)[0].abs() <= x && small.coords(i)[1].ln().abs() <= 1.0)
            .map(|i| i as u32)
            .collect();
        let rep = quasi_convexity_defect(&small, &band, 2.0, &DefectOptions::default())?;
        println!("horocycle band |x| ≤ {x}: {} points, defect {:.3}", band.len(), rep.defect);
    }
    Ok(())
}
