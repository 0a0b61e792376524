//! Discrete combs and their polynomial growth, and the level-set bound on
//! continuous D-combs.

use coarselab::analysis::{ball_growth, fit_growth};
use coarselab::constructions::{DComb, Spine};
use coarselab::spaces::build_comb;

fn main() -> coarselab::Result<()> {
    for d in 1..=3 {
        let extent = [0, 400, 60, 16][d as usize];
        let c = build_comb(d, extent)?;
        let g = ball_growth(&c, c.basepoint(), None);
        let fit = fit_growth(&g, 2)?;
        println!(
            "C_{d} with extent {extent}: {} points, growth exponent {:.3} over {} radii",
            c.len(),
            fit.exponent,
            fit.points
        );
    }

    let comb = DComb::new(
        Spine::Semicircle {
            center: 0.0,
            radius: 50.0,
        },
        0.8,
        0.3,
    )?;
    let a = 2.0;
    let mut worst = f64::INFINITY;
    let mut n = 0;
    for (comp, a0) in comb.components(a, (-12.0, 12.0)) {
        let levels = comb.critical_levels(a0, 6.0, 60);
        for lc in comb.check_levels(a, &levels) {
            worst = worst.min(lc.bound - lc.count as f64);
            n += 1;
            assert!(lc.holds(), "{comp:?}: {lc:?}");
        }
    }
    println!("D-comb cut at e^{a}: {n} level counts checked, smallest slack {worst:.3}");
    Ok(())
}
