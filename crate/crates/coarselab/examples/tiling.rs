//! The two-colour tiling of ℍ² and the growth of its pieces.

use coarselab::analysis::{fit_growth, piece_growth};
use coarselab::constructions::tiling::tile_pieces;
use coarselab::constructions::{build_h2_tiling, TilingWindow};
use coarselab::covers::{min_same_colour_distance, r_multiplicity, Metric};
use coarselab::spaces::{generate_net, Model, Window};

fn main() -> coarselab::Result<()> {
    let r = 1.0;
    let radius = 8.0;
    let tiling = build_h2_tiling(
        r,
        TilingWindow {
            center: (0.0, 1.0),
            radius,
            resolution: (-radius).exp(),
        },
    )?;
    println!(
        "r = {r}: dilation {:.6}, λ = {:.4?}, {} tiles in the window",
        tiling.dilation,
        tiling.lambda,
        tiling.tiles.len()
    );

    let net = generate_net(
        Model::H(2),
        &Window::HyperbolicBall {
            center: vec![0.0, 1.0],
            radius,
        },
        0.5,
        1.0,
    )?;
    let (keys, dec) = tile_pieces(r, &net)?;
    let sep = min_same_colour_distance(&net, &dec, 3.0 * r);
    let mult = r_multiplicity(&net, &dec.to_cover(), r, Metric::Model);
    println!(
        "{} net points in {} pieces; same-colour separation {sep:?}, {r}-multiplicity {}",
        net.len(),
        dec.len(),
        mult.value
    );

    for (key, piece) in keys.iter().zip(&dec.pieces).filter(|(k, _)| k.depth() == 0) {
        let g = piece_growth(&net, piece, None).expect("nonempty piece");
        match fit_growth(&g, 3) {
            Ok(f) => println!("{:<8} {:>6} points  exponent {:.3} (residual {:.3})", key.label(), piece.len(), f.exponent, f.residual),
            Err(e) => println!("{:<8} {:>6} points  {e}", key.label(), piece.len()),
        }
    }
    Ok(())
}
