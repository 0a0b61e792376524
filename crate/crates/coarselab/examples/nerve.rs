//! The barycentric map of a cover into its nerve.

use coarselab::constructions::nerve_map;
use coarselab::covers::Cover;
use coarselab::spaces::{generate_net, Model, Window};

fn main() -> coarselab::Result<()> {
    for hi in [100, 400] {
        let z = generate_net(Model::Z, &Window::Interval { lo: 0, hi }, 1.0, 1.0)?;
        let n = z.len() as u32;
        let cover = Cover::new((0..n).step_by(8).map(|s| (s..(s + 12).min(n)).collect()).collect());
        let nerve = nerve_map(&z, &cover)?;
        println!(
            "[0, {hi}]: {} pieces, {} simplices, dimension {}, bad points {}, Lipschitz {:.4}",
            cover.len(),
            nerve.simplices.len(),
            nerve.dimension,
            nerve.check(&z, &cover).len(),
            nerve.lipschitz(&z)
        );
    }
    let z = generate_net(Model::Z, &Window::Interval { lo: 0, hi: 20 }, 1.0, 1.0)?;
    let cover = Cover::new(vec![(0..12).collect(), (8..21).collect()]);
    let nerve = nerve_map(&z, &cover)?;
    for x in 6..14 {
        println!("  φ({x}) = {:?}", nerve.coordinates[x]);
    }
    Ok(())
}
