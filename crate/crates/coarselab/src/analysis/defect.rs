use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::covers::connected_components;
use crate::error::{Error, Result};
use crate::hyperbolic::{geodesic_samples, h2_distance};
use crate::spaces::{LayerIndex, SpaceGraph, Window};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectOptions {
    /// Pairs are enumerated exhaustively up to this count.
    pub pair_cap: u64,
    pub seed: u64,
}

impl Default for DefectOptions {
    fn default() -> Self {
        DefectOptions {
            pair_cap: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub defect: f64,
    /// Subset points realizing the defect, and the geodesic sample.
    pub pair: Option<(usize, usize)>,
    pub witness: Option<(f64, f64)>,
    pub pairs: u64,
    pub exhaustive: bool,
}

/// Nearest-point queries against a subset of an ℍ² window.
pub struct SubsetIndex {
    coords: Vec<f64>,
    ids: Vec<usize>,
    index: LayerIndex,
}

impl SubsetIndex {
    pub fn new(space: &SpaceGraph, subset: &[u32]) -> Result<Self> {
        if space.halfspace_dim() != Some(2) {
            return Err(Error::Parameter(format!("{} is not an ℍ² window", space.name)));
        }
        let ids: Vec<usize> = subset.iter().map(|&x| x as usize).collect();
        let coords: Vec<f64> = ids.iter().flat_map(|&i| space.coords(i).to_vec()).collect();
        let h = space.separation / 2.0;
        let index = LayerIndex::build(2, h, 2.0 * space.separation, &coords);
        Ok(SubsetIndex { coords, ids, index })
    }

    /// Distance from `p` to the subset.
    pub fn distance(&self, p: (f64, f64)) -> f64 {
        self.index
            .nearest(&self.coords, &[p.0, p.1], f64::INFINITY)
            .map_or(f64::INFINITY, |(_, d)| d)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// A defect value with the subset pair and geodesic sample realizing it.
pub type Worst = (f64, Option<(usize, usize)>, Option<(f64, f64)>);

/// Largest distance from a geodesic sample to the subset over the given
/// pairs of subset positions.
pub fn defect_over_pairs(space: &SpaceGraph, index: &SubsetIndex, pairs: &[(usize, usize)]) -> Worst {
    let step = space.separation / 2.0;
    let mut best = (0.0, None, None);
    for &(i, j) in pairs {
        let a = index.ids[i];
        let b = index.ids[j];
        let (p, q) = (space.coords(a), space.coords(b));
        for z in geodesic_samples((p[0], p[1]), (q[0], q[1]), step) {
            let d = index.distance(z);
            if d > best.0 {
                best = (d, Some((a, b)), Some(z));
            }
        }
    }
    best
}

/// Pairs of subset positions: all of them below the cap, otherwise a
/// sample stratified over dyadic distance classes.
pub fn defect_pairs(space: &SpaceGraph, subset: &[u32], opts: &DefectOptions) -> (Vec<(usize, usize)>, bool) {
    let n = subset.len();
    let total = (n as u64) * (n as u64).saturating_sub(1) / 2;
    if total <= opts.pair_cap {
        let mut v = Vec::with_capacity(total as usize);
        for i in 0..n {
            for j in i + 1..n {
                v.push((i, j));
            }
        }
        return (v, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dist = |i: usize, j: usize| {
        let (p, q) = (space.coords(subset[i] as usize), space.coords(subset[j] as usize));
        h2_distance(p[0], p[1], q[0], q[1])
    };
    let class = |d: f64| if d < 1.0 { 0 } else { 1 + d.log2().floor() as usize };
    let diam = match &space.window {
        Window::HyperbolicBall { radius, .. } => 2.0 * radius,
        _ => 64.0,
    };
    let classes = 1 + class(diam);
    let quota = (opts.pair_cap as usize).div_ceil(classes);
    let mut filled = vec![0usize; classes];
    let mut v = Vec::new();
    // Stop after a fixed number of draws so rare classes cannot stall.
    for _ in 0..opts.pair_cap.saturating_mul(4) {
        if v.len() as u64 >= opts.pair_cap {
            break;
        }
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let k = class(dist(i, j)).min(classes - 1);
        if filled[k] < quota {
            filled[k] += 1;
            v.push((i.min(j), i.max(j)));
        }
    }
    (v, false)
}

/// Largest model distance from a point of a geodesic between two subset
/// points to the subset. The subset must be `r`-connected.
pub fn quasi_convexity_defect(space: &SpaceGraph, subset: &[u32], r: f64, opts: &DefectOptions) -> Result<DefectReport> {
    if subset.is_empty() {
        return Err(Error::EmptySpace("empty subset".into()));
    }
    let comps = connected_components(space, subset, r);
    if comps.len() > 1 {
        return Err(farthest_components(space, &comps, r));
    }
    let index = SubsetIndex::new(space, subset)?;
    let (pairs, exhaustive) = defect_pairs(space, subset, opts);
    let (defect, pair, witness) = defect_over_pairs(space, &index, &pairs);
    Ok(DefectReport {
        defect,
        pair,
        witness,
        pairs: pairs.len() as u64,
        exhaustive,
    })
}

/// Precondition error naming the two components farthest apart, measured
/// between their first points.
fn farthest_components(space: &SpaceGraph, comps: &[Vec<u32>], r: f64) -> Error {
    let mut best = (0.0, 0, 1);
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            let d = space.dist(comps[i][0] as usize, comps[j][0] as usize);
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    Error::precondition(
        format!("subset has {} components at scale {r}", comps.len()),
        vec![comps[best.1][0] as usize, comps[best.2][0] as usize],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{generate_net, Model};

    fn plane(radius: f64) -> SpaceGraph {
        generate_net(
            Model::H(2),
            &Window::HyperbolicBall {
                center: vec![0.0, 1.0],
                radius,
            },
            1.0,
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn geodesic_tube_is_quasi_convex() {
        let s = plane(6.0);
        let tube: Vec<u32> = (0..s.len() as u32)
            .filter(|&i| s.coords(i as usize)[0].abs() <= s.coords(i as usize)[1].max(1e-9) * 1.2)
            .collect();
        let rep = quasi_convexity_defect(&s, &tube, 3.0, &DefectOptions::default()).unwrap();
        assert!(rep.exhaustive);
        assert!(rep.defect <= 2.0 + 1.0, "{rep:?}");
    }

    #[test]
    fn split_subset_is_rejected() {
        let s = plane(5.0);
        let b = s.basepoint();
        let far: Vec<u32> = (0..s.len()).filter(|&i| s.dist(b, i) > 4.5).map(|i| i as u32).collect();
        let near = b as u32;
        let mut subset = vec![near];
        subset.extend(far.iter().take(1));
        subset.sort();
        match quasi_convexity_defect(&s, &subset, 1.5, &DefectOptions::default()) {
            Err(Error::Precondition { witness, .. }) => assert_eq!(witness.len(), 2),
            other => panic!("{other:?}"),
        }
    }
}
