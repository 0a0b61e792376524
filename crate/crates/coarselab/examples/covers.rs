//! Cover algebra on integer windows: greedy extraction of a coloured
//! decomposition, Kolmogorov amplification and the product decomposition.

use std::sync::Arc;

use coarselab::covers::{
    check_disjointness, greedy_decomposition, kolmogorov_amplify, product_decomposition, r_multiplicity, Cover,
    Metric,
};
use coarselab::spaces::{build_product, generate_net, Model, Window};

fn main() -> coarselab::Result<()> {
    let z = generate_net(Model::Z, &Window::Interval { lo: -60, hi: 60 }, 1.0, 1.0)?;
    let n = z.len() as u32;

    // Overlapping intervals of length 12, shifted by 10.
    let cover = Cover::new(
        (0..n)
            .step_by(10)
            .map(|s| (s..(s + 12).min(n)).collect())
            .collect(),
    );
    let r = 1.0;
    let mult = r_multiplicity(&z, &cover, 2.0 * r, Metric::Model);
    println!("{} intervals, 2R-multiplicity {}", cover.len(), mult.value);

    let dec = greedy_decomposition(&z, &cover, r, 1)?;
    println!(
        "greedy: {} pieces in {} colours, violations {}",
        dec.len(),
        dec.colours(),
        check_disjointness(&z, &dec).len()
    );

    let amp = kolmogorov_amplify(&z, &dec, 1)?;
    let low = amp.coverage_counts(z.len()).into_iter().min().unwrap_or(0);
    println!(
        "amplified: {} colours, r {:.3}, every point in ≥ {low} classes",
        amp.colours(),
        amp.r
    );

    // Both factors have asymptotic dimension 1, so each needs 3 colours.
    let small = generate_net(Model::Z, &Window::Interval { lo: -20, hi: 20 }, 1.0, 1.0)?;
    let cover = Cover::new((0..41).step_by(8).map(|s| (s..(s + 10).min(41)).collect()).collect());
    let d1 = kolmogorov_amplify(&small, &greedy_decomposition(&small, &cover, 1.0, 1)?, 1)?;
    let small = Arc::new(small);
    let prod = build_product(&[small.clone(), small])?;
    let pd = product_decomposition(&d1, &d1, &prod)?;
    let uncovered = pd.coverage_counts(prod.len()).iter().filter(|&&c| c == 0).count();
    println!(
        "product: {} points, {} pieces in {} colours, {uncovered} uncovered, violations {}",
        prod.len(),
        pd.len(),
        pd.colours(),
        check_disjointness(&prod, &pd).len()
    );
    Ok(())
}
