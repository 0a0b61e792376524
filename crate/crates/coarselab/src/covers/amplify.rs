use std::collections::BTreeMap;

use super::ColoredDecomposition;
use crate::error::{Error, Result};
use crate::spaces::SpaceGraph;

/// Adds one colour to a `(3r, k)` decomposition in which every point lies in
/// at least `(k + 1) − n` colour classes, giving an `(r, k + 1)` decomposition
/// in which every point lies in at least `(k + 2) − n` classes.
///
/// Old pieces are fattened to their closed model `r`-neighbourhoods inside
/// the window. The new colour is the union of the sets
/// `Y_S = ⋂_{s∈S} (X_s \ ⋃_{i∉S} [X_i]_r)` over `S ⊆ {0, …, k}` with
/// `|S| = (k + 1) − n`; its pieces are `Y_S ∩ X_{min S, j}`.
pub fn kolmogorov_amplify(space: &SpaceGraph, decomp: &ColoredDecomposition, n: u32) -> Result<ColoredDecomposition> {
    let k = decomp.d;
    if n > k {
        return Err(Error::Parameter(format!("n = {n} exceeds k = {k}")));
    }
    let need = (k + 1 - n) as usize;
    let npts = space.len();
    let colours = k as usize + 1;
    let counts = decomp.coverage_counts(npts);
    if let Some(x) = counts.iter().position(|&c| (c as usize) < need) {
        return Err(Error::precondition(
            format!("point {x} lies in {} colour classes, fewer than {need}", counts[x]),
            vec![x],
        ));
    }
    let r = decomp.r / 3.0;

    // Membership masks over colours: `inside` for X_i, `fat` for [X_i]_r.
    let mut inside = vec![0u64; npts];
    let mut fat = vec![0u64; npts];
    if colours > 64 {
        return Err(Error::Parameter("at most 64 colours are supported".into()));
    }
    let mut fattened = Vec::with_capacity(decomp.len());
    let mut stamp = vec![usize::MAX; npts];
    for (p, pts) in decomp.pieces.iter().enumerate() {
        let bit = 1u64 << decomp.colour[p];
        let mut f = Vec::new();
        for &x in pts {
            inside[x as usize] |= bit;
            space.for_each_within(x as usize, r, |y| {
                if stamp[y] != p {
                    stamp[y] = p;
                    f.push(y as u32);
                }
            });
        }
        for &y in &f {
            fat[y as usize] |= bit;
        }
        fattened.push(f);
    }

    let mut pieces = fattened;
    let mut colour = decomp.colour.clone();
    let mut origin: Vec<usize> = (0..decomp.len()).collect();
    let mut labels = if decomp.labels.is_empty() {
        Vec::new()
    } else {
        decomp.labels.clone()
    };

    // Y_S is non-empty only at points whose plain and fattened colour sets
    // coincide and have exactly `need` elements; S is then that set.
    let mut new_pieces: BTreeMap<(u64, usize), Vec<u32>> = BTreeMap::new();
    let mut first_piece: Vec<Vec<usize>> = vec![Vec::new(); npts];
    for (p, pts) in decomp.pieces.iter().enumerate() {
        for &x in pts {
            first_piece[x as usize].push(p);
        }
    }
    for x in 0..npts {
        let s = inside[x];
        if s != fat[x] || s.count_ones() as usize != need {
            continue;
        }
        let smin = s.trailing_zeros();
        for &p in &first_piece[x] {
            if decomp.colour[p] == smin {
                new_pieces.entry((s, p)).or_default().push(x as u32);
            }
        }
    }
    for ((s, p), pts) in new_pieces {
        pieces.push(pts);
        colour.push(k + 1);
        origin.push(p);
        if !labels.is_empty() {
            labels.push(format!("Y{:b}|{}", s, decomp.labels[p]));
        }
    }
    let mut out = ColoredDecomposition::new(pieces, colour, r);
    out.d = k + 1;
    out.origin = origin;
    out.labels = labels;
    Ok(out)
}
