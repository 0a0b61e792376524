//! The coordinate-sharing map `ℍ^d → (ℍ²)^{d−1}` and the cover of ℍ^d it
//! pulls back from products of tiling decompositions.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::tiling::tile_pieces;
use super::{MapRecord, Provenance};
use crate::covers::{kolmogorov_amplify, ColoredDecomposition};
use crate::error::{Error, Result};
use crate::spaces::{build_product_capped, generate_net, Model, SpaceGraph, Window};

/// Products built here are never materialized, so the only limit is the
/// index width.
const IMPLICIT_CAP: u128 = u32::MAX as u128;

/// Nearest point of `factor` to `(x; y)`, or `None` when the window has no
/// point within twice its separation.
pub fn snap(factor: &SpaceGraph, x: f64, y: f64) -> Option<usize> {
    let index = factor.index()?;
    let crate::spaces::Points::HalfSpace { coords, .. } = &factor.points else {
        return None;
    };
    index
        .nearest(coords, &[x, y], 2.0 * factor.separation)
        .map(|(i, _)| i)
}

/// `(x₁, …, x_{d−1}; y) ↦ ((x₁; y), …, (x_{d−1}; y))`, each coordinate
/// snapped to the nearest point of the corresponding ℍ² net.
pub fn brady_farb(source: Arc<SpaceGraph>, factors: Vec<Arc<SpaceGraph>>) -> Result<MapRecord> {
    let assignment = project(&source, &factors)?;
    let target = Arc::new(build_product_capped(&factors, IMPLICIT_CAP)?);
    let flat = assignment
        .iter()
        .map(|parts| target.tuple_index(parts))
        .collect();
    let prov = Provenance::new("bradyfarb").with("dim", source.halfspace_dim().unwrap_or(0));
    MapRecord::new(source, target, flat, prov)
}

/// Per-point factor indices of the map.
fn project(source: &SpaceGraph, factors: &[Arc<SpaceGraph>]) -> Result<Vec<Vec<usize>>> {
    let Some(d) = source.halfspace_dim() else {
        return Err(Error::Parameter("source must be a half-space net".into()));
    };
    if factors.len() != d - 1 {
        return Err(Error::Arity(format!(
            "ℍ^{d} needs {} factors, got {}",
            d - 1,
            factors.len()
        )));
    }
    if let Some(bad) = factors.iter().position(|f| f.halfspace_dim() != Some(2)) {
        return Err(Error::Parameter(format!("factor {bad} is not an ℍ² net")));
    }
    (0..source.len())
        .map(|p| {
            let c = source.coords(p);
            let y = c[d - 1];
            (0..d - 1)
                .map(|i| snap(&factors[i], c[i], y).ok_or(Error::Window { point: p, factor: i }))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HdCoverParams {
    pub dim: usize,
    /// Radius of the source window around `(0, …, 0; 1)`.
    pub radius: f64,
    pub sep: f64,
    pub edge_threshold: f64,
    /// Separation of the ℍ² factor nets.
    pub factor_sep: f64,
    /// Tiling parameter.
    pub r: f64,
}

impl HdCoverParams {
    pub fn new(dim: usize, radius: f64, r: f64) -> Self {
        HdCoverParams {
            dim,
            radius,
            sep: 1.0,
            edge_threshold: 2.0,
            factor_sep: 0.5,
            r,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HdCover {
    pub source: Arc<SpaceGraph>,
    /// The map to the factor product; absent for `d = 2`.
    pub map: Option<MapRecord>,
    /// The (amplified) tiling decomposition of the common factor net.
    pub factor_decomposition: ColoredDecomposition,
    pub decomposition: ColoredDecomposition,
}

/// Cover of an ℍ^d net: for `d = 2` the tiling decomposition itself; for
/// `d ≥ 3` the pullback under [`brady_farb`] of the product of `d − 1`
/// copies of the tiling decomposition, each amplified to `d` colours.
///
/// The product decomposition is never materialized: a source point lies in
/// the colour-`c` piece `(a₁, …, a_{d−1})` exactly when its `i`-th snapped
/// coordinate lies in the colour-`c` factor piece `aᵢ`.
pub fn hd_cover(params: &HdCoverParams) -> Result<HdCover> {
    let d = params.dim;
    if d < 2 {
        return Err(Error::Parameter("hd_cover needs d ≥ 2".into()));
    }
    let mut center = vec![0.0; d];
    center[d - 1] = 1.0;
    let window = Window::HyperbolicBall {
        center,
        radius: params.radius,
    };
    let source = Arc::new(generate_net(Model::H(d), &window, params.sep, params.edge_threshold)?);
    if d == 2 {
        let (keys, mut dec) = tile_pieces(params.r, &source)?;
        dec.labels = keys.iter().map(|k| k.label()).collect();
        return Ok(HdCover {
            source,
            map: None,
            factor_decomposition: dec.clone(),
            decomposition: dec,
        });
    }
    let fwin = Window::HyperbolicBall {
        center: vec![0.0, 1.0],
        radius: params.radius,
    };
    let factor = Arc::new(generate_net(
        Model::H(2),
        &fwin,
        params.factor_sep,
        2.0 * params.factor_sep,
    )?);
    let (keys, mut fdec) = tile_pieces(params.r, &factor)?;
    fdec.labels = keys.iter().map(|k| k.label()).collect();
    while (fdec.d as usize) < d - 1 {
        fdec = kolmogorov_amplify(&factor, &fdec, 1)?;
    }
    let colours = fdec.d as usize + 1;

    // Factor pieces within one colour are disjoint, so each factor point has
    // at most one piece per colour.
    let mut lookup = vec![u32::MAX; colours * factor.len()];
    for (p, pts) in fdec.pieces.iter().enumerate() {
        let c = fdec.colour[p] as usize;
        for &x in pts {
            lookup[c * factor.len() + x as usize] = p as u32;
        }
    }
    let factors = vec![factor.clone(); d - 1];
    let map = brady_farb(source.clone(), factors)?;
    let mut groups: BTreeMap<(u32, Vec<u32>), Vec<u32>> = BTreeMap::new();
    for (p, &t) in map.assignment.iter().enumerate() {
        let parts = map.target.tuple(t);
        'colour: for c in 0..colours {
            let mut key = Vec::with_capacity(d - 1);
            for &x in &parts {
                let piece = lookup[c * factor.len() + x];
                if piece == u32::MAX {
                    continue 'colour;
                }
                key.push(piece);
            }
            groups.entry((c as u32, key)).or_default().push(p as u32);
        }
    }
    let mut pieces = Vec::with_capacity(groups.len());
    let mut colour = Vec::with_capacity(groups.len());
    let mut labels = Vec::with_capacity(groups.len());
    for ((c, key), pts) in groups {
        labels.push(
            key.iter()
                .map(|&k| fdec.labels[k as usize].as_str())
                .collect::<Vec<_>>()
                .join(" x "),
        );
        pieces.push(pts);
        colour.push(c);
    }
    let r = fdec.r / map.measured_lipschitz.max(f64::MIN_POSITIVE);
    let mut decomposition = ColoredDecomposition::new(pieces, colour, r);
    decomposition.d = fdec.d;
    decomposition.labels = labels;
    Ok(HdCover {
        source,
        map: Some(map),
        factor_decomposition: fdec,
        decomposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h2(radius: f64, sep: f64) -> Arc<SpaceGraph> {
        let w = Window::HyperbolicBall {
            center: vec![0.0, 1.0],
            radius,
        };
        Arc::new(generate_net(Model::H(2), &w, sep, 2.0 * sep).unwrap())
    }

    #[test]
    fn planar_map_is_identity_shaped() {
        let s = h2(3.0, 1.0);
        let f = brady_farb(s.clone(), vec![s.clone()]).unwrap();
        for (i, &t) in f.assignment.iter().enumerate() {
            assert_eq!(t, i);
        }
        assert_eq!(f.measured_max_fiber, 1);
    }

    #[test]
    fn symmetric_point_snaps_to_itself() {
        let w = Window::HyperbolicBall {
            center: vec![0.0, 0.0, 1.0],
            radius: 2.0,
        };
        let s = Arc::new(generate_net(Model::H(3), &w, 1.0, 2.0).unwrap());
        let fac = h2(2.5, 0.5);
        let f = brady_farb(s.clone(), vec![fac.clone(), fac.clone()]).unwrap();
        let mut diagonal = 0;
        for p in 0..s.len() {
            let c = s.coords(p);
            if c[0] == c[1] {
                diagonal += 1;
                let parts = f.target.tuple(f.assignment[p]);
                assert_eq!(parts[0], parts[1]);
            }
        }
        assert!(diagonal > 0);
    }

    #[test]
    fn projection_outside_factor_window_is_reported() {
        let w = Window::HyperbolicBall {
            center: vec![0.0, 0.0, 1.0],
            radius: 4.0,
        };
        let s = Arc::new(generate_net(Model::H(3), &w, 1.0, 2.0).unwrap());
        let fac = h2(1.0, 0.5);
        let err = brady_farb(s, vec![fac.clone(), fac]).unwrap_err();
        assert!(matches!(err, Error::Window { .. }));
    }
}
