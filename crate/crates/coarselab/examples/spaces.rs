//! Generates the basic windows and prints their sizes, degree bounds and
//! ball counts.

use std::sync::Arc;

use coarselab::spaces::{build_comb, build_product, generate_net, Model, Window};

fn main() -> coarselab::Result<()> {
    let z = generate_net(Model::Z, &Window::Interval { lo: -50, hi: 50 }, 1.0, 1.0)?;
    let t3 = generate_net(Model::T3, &Window::TreeBall { radius: 8 }, 1.0, 1.0)?;
    let h2 = generate_net(
        Model::H(2),
        &Window::HyperbolicBall {
            center: vec![0.0, 1.0],
            radius: 6.0,
        },
        1.0,
        2.0,
    )?;
    let comb = build_comb(2, 20)?;
    for s in [&z, &t3, &h2, &comb] {
        let o = s.basepoint();
        let balls: Vec<usize> = (0..=4).map(|r| s.bfs_ball(o, r, None).len()).collect();
        println!(
            "{:<24} {:>6} points  degree ≤ {:<2}  |B(o, r)| for r ≤ 4: {balls:?}",
            s.name,
            s.len(),
            s.degree_histogram().len() - 1
        );
    }

    // The ℓ¹ product: distances add up factorwise.
    let p = build_product(&[Arc::new(z), Arc::new(t3)])?;
    let (a, b) = (p.tuple_index(&[0, 0]), p.tuple_index(&[100, 509]));
    println!("product of {} points; d({:?}, {:?}) = {}", p.len(), p.tuple(a), p.tuple(b), p.dist(a, b));
    Ok(())
}
