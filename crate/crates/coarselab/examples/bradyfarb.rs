//! Covering an ℍ³ net by pulling back a product of tiling decompositions
//! along the map to ℍ² × ℍ².

use coarselab::analysis::{fit_growth, piece_growth};
use coarselab::constructions::{hd_cover, HdCoverParams};
use coarselab::covers::check_disjointness;

fn main() -> coarselab::Result<()> {
    let hd = hd_cover(&HdCoverParams::new(3, 5.0, 1.0))?;
    let dec = &hd.decomposition;
    let f = hd.map.as_ref().expect("d = 3 has a map");
    println!(
        "{} points of ℍ³ → {} points of ℍ² × ℍ²: Lipschitz {:.3}, max fibre {}",
        hd.source.len(),
        f.target.len(),
        f.measured_lipschitz,
        f.measured_max_fiber
    );
    println!(
        "factor decomposition: {} pieces in {} colours; pullback: {} pieces in {} colours, r = {:.4}, violations {}",
        hd.factor_decomposition.len(),
        hd.factor_decomposition.colours(),
        dec.len(),
        dec.colours(),
        dec.r,
        check_disjointness(&hd.source, dec).len()
    );
    let exps: Vec<f64> = dec
        .pieces
        .iter()
        .filter_map(|p| piece_growth(&hd.source, p, None))
        .filter_map(|g| fit_growth(&g, 1).ok())
        .map(|f| f.exponent)
        .collect();
    match exps.iter().copied().reduce(f64::max) {
        Some(max) => println!("{} pieces admit a growth fit; largest exponent {max:.3}", exps.len()),
        None => println!("no piece is deep enough for a growth fit at this window radius"),
    }
    Ok(())
}
