use std::collections::HashMap;

use super::{ColoredDecomposition, Cover};
use crate::constructions::MapRecord;
use crate::error::Result;
use crate::spaces::SpaceGraph;

/// Pieces containing each image point, keyed by target index.
fn image_membership(f: &MapRecord, pieces: &[Vec<u32>]) -> HashMap<usize, Vec<usize>> {
    let mut image: HashMap<usize, Vec<usize>> = f.assignment.iter().map(|&t| (t, Vec::new())).collect();
    for (k, p) in pieces.iter().enumerate() {
        for &x in p {
            if let Some(v) = image.get_mut(&(x as usize)) {
                v.push(k);
            }
        }
    }
    image
}

fn preimages(f: &MapRecord, pieces: &[Vec<u32>]) -> Vec<(usize, Vec<u32>)> {
    let image = image_membership(f, pieces);
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); pieces.len()];
    for (s, &t) in f.assignment.iter().enumerate() {
        for &k in &image[&t] {
            out[k].push(s as u32);
        }
    }
    out.into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

/// The cover of the source by the non-empty preimages of target pieces.
pub fn pullback_cover(f: &MapRecord, cover: &Cover) -> Result<Cover> {
    let pre = preimages(f, &cover.pieces);
    let mut out = Cover::new(pre.iter().map(|(_, v)| v.clone()).collect());
    out.labels = pre
        .iter()
        .map(|(k, _)| {
            cover
                .labels
                .get(*k)
                .cloned()
                .unwrap_or_else(|| format!("f^-1({k})"))
        })
        .collect();
    out.validate(&f.source)?;
    Ok(out)
}

/// Colour-preserving pullback. The claimed separation is `r / C` with `C`
/// the measured Lipschitz constant of `f`.
pub fn pullback_decomposition(f: &MapRecord, decomp: &ColoredDecomposition) -> Result<ColoredDecomposition> {
    let pre = preimages(f, &decomp.pieces);
    let c = f.measured_lipschitz.max(f64::MIN_POSITIVE);
    let mut out = ColoredDecomposition::new(
        pre.iter().map(|(_, v)| v.clone()).collect(),
        pre.iter().map(|(k, _)| decomp.colour[*k]).collect(),
        decomp.r / c,
    );
    out.d = decomp.d;
    out.origin = pre.iter().map(|(k, _)| *k).collect();
    Ok(out)
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] as usize != r {
            r = self.0[r] as usize;
        }
        let mut y = x;
        while self.0[y] as usize != r {
            let next = self.0[y] as usize;
            self.0[y] = r as u32;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.0[hi] = lo as u32;
        }
    }
}

/// Components of `piece` under the relation "model distance ≤ R", ordered
/// by their smallest point.
pub fn connected_components(space: &SpaceGraph, piece: &[u32], radius: f64) -> Vec<Vec<u32>> {
    let pos: HashMap<u32, usize> = piece.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut uf = UnionFind((0..piece.len() as u32).collect());
    for (i, &x) in piece.iter().enumerate() {
        space.for_each_within(x as usize, radius, |y| {
            if let Some(&j) = pos.get(&(y as u32)) {
                uf.union(i, j);
            }
        });
    }
    let mut groups: HashMap<usize, Vec<u32>> = HashMap::new();
    for (i, &x) in piece.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(x);
    }
    let mut comps: Vec<Vec<u32>> = groups.into_values().collect();
    for c in &mut comps {
        c.sort_unstable();
    }
    comps.sort_unstable_by_key(|c| c[0]);
    comps
}

/// Splits every piece into its `R`-connected components.
pub fn refine_connected(space: &SpaceGraph, cover: &Cover, radius: f64) -> Cover {
    let mut pieces = Vec::new();
    let mut labels = Vec::new();
    for (k, p) in cover.pieces.iter().enumerate() {
        let base = cover.labels.get(k).cloned().unwrap_or_else(|| k.to_string());
        for (j, c) in connected_components(space, p, radius).into_iter().enumerate() {
            pieces.push(c);
            labels.push(format!("{base}#{j}"));
        }
    }
    Cover { pieces, labels }
}

/// Cover by the closed model balls `B(c, R)` about a maximal `R`-separated
/// set of centres chosen greedily in index order; every point lies within
/// `R` of some centre.
pub fn ball_cover(space: &SpaceGraph, radius: f64) -> Cover {
    let n = space.len();
    let mut near = vec![false; n];
    let mut pieces = Vec::new();
    let mut labels = Vec::new();
    for c in 0..n {
        if near[c] {
            continue;
        }
        let mut ball = Vec::new();
        space.for_each_within(c, radius, |y| {
            ball.push(y as u32);
        });
        for &y in &ball {
            near[y as usize] = true;
        }
        pieces.push(ball);
        labels.push(format!("B({c},{radius})"));
    }
    let mut cover = Cover::new(pieces);
    cover.labels = labels;
    cover
}
