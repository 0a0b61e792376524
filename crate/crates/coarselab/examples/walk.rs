//! The walk ℤ → T₃: fibres, adjacency and the logarithmic bound on
//! distances from the origin.

use coarselab::analysis::{distortion_profile, DistortionOptions};
use coarselab::constructions::tree_walk_window;

fn main() -> coarselab::Result<()> {
    let b = 5000u64;
    let walk = tree_walk_window(b)?;
    let f = &walk.map;
    println!(
        "[-{b}, {b}] → {} tree vertices (spine range {}); max fibre {}, non-adjacent steps {}",
        f.target.len(),
        walk.spine,
        f.measured_max_fiber,
        f.non_adjacent_edges().len()
    );

    let dist = walk.anchored_distances();
    let worst = (-(b as i64)..=b as i64)
        .zip(&dist)
        .map(|(n, &d)| (2.0 * (1.0 + n.unsigned_abs() as f64).log2() + 6.0 - d as f64, n))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .expect("nonempty window");
    println!("smallest slack in d(W(0), W(n)) ≤ 2 log₂(1+|n|) + 6: {:.3} at n = {}", worst.0, worst.1);

    let opts = DistortionOptions {
        pair_cap: 200_000,
        seed: 7,
        anchor: Some(f.source.basepoint()),
    };
    let prof = distortion_profile(f, &opts);
    println!(
        "all pairs: log constant {:.3}; anchored: log constant {:.3}",
        prof.log_fit.fitted_c,
        prof.anchored.as_ref().map_or(f64::NAN, |a| a.log_fit.fitted_c)
    );
    for bk in prof.buckets.iter().take(12) {
        println!("  d ∈ [{:>5}, {:>5})  mean {:>6.2}  max {:>4}", bk.lo, bk.hi, bk.mean, bk.max);
    }
    Ok(())
}
