//! Two-coloured tiling of the hyperbolic plane.
//!
//! With `λ_k = sinh(k r)`, the right half-plane splits into
//! * `B₁` between the lines `x = 0` and `x = λ₁ y`,
//! * `A` between `x = λ₁ y` and `x = λ₃ y`,
//! * `B₂` between `x = λ₃ y` and the chain of semicircles `S_n = xⁿ·S₀`,
//!   where `S₀` spans `[1, x]` and is tangent to the line `x = λ₄ y`.
//!
//! The map `ψ₀(z) = (x z + 1)/(z + 1)` sends the right half-plane onto the
//! inside of `S₀`; with `ψ_n = D_{xⁿ} ∘ ψ₀` the picture repeats inside every
//! `S_n`, and the B₁ copy inside `S_n` joins the B tile of the outer frame.
//! The left half-plane is the mirror image, and the two root B₁ tiles form a
//! single piece. A tiles get colour 0, B and B₁ tiles colour 1.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::covers::ColoredDecomposition;
use crate::error::{Error, Result};
use crate::hyperbolic::{euclidean_ball, Mobius};
use crate::spaces::SpaceGraph;

const TOL: f64 = 1e-9;
const MAX_DEPTH: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TileKind {
    A,
    B,
    B1,
}

impl TileKind {
    pub fn colour(self) -> u32 {
        match self {
            TileKind::A => 0,
            TileKind::B | TileKind::B1 => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// Identifies a tile: its kind, the half-plane it descends from, and the
/// semicircle indices of the nested frames containing it. The merged root
/// B₁ tile has side `R` and an empty path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TileKey {
    pub kind: TileKind,
    pub side: Side,
    pub path: Vec<i32>,
}

impl TileKey {
    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn label(&self) -> String {
        let path: Vec<String> = self.path.iter().map(|n| n.to_string()).collect();
        format!("{:?}:{:?}:{}", self.kind, self.side, path.join("."))
    }
}

impl Ord for TileKey {
    /// Depth first, then kind, then side and path.
    fn cmp(&self, other: &Self) -> Ordering {
        self.depth()
            .cmp(&other.depth())
            .then(self.kind.cmp(&other.kind))
            .then(self.side.cmp(&other.side))
            .then(self.path.cmp(&other.path))
    }
}

impl PartialOrd for TileKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A tile with the isometry carrying the standard frame onto its frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub key: TileKey,
    pub transform: Mobius,
    pub depth: usize,
}

/// Window over which tiles are listed: a hyperbolic disc, with tiles whose
/// bounding semicircle has Euclidean radius below `resolution` omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingWindow {
    pub center: (f64, f64),
    pub radius: f64,
    pub resolution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tiling {
    pub r: f64,
    pub lambda: [f64; 5],
    /// Dilation factor `x` between consecutive semicircles.
    pub dilation: f64,
    pub window: TilingWindow,
    pub tiles: Vec<Tile>,
}

/// Solves the tangency of `S₀` (spanning `[1, x]`) with the line
/// `x = λ₄ y` by bisection on `x`.
pub fn solve_dilation(r: f64) -> Result<f64> {
    let c4 = (4.0 * r).cosh();
    // Distance from the centre (1+x)/2 to the line equals the radius (x−1)/2.
    let g = |x: f64| (x - 1.0) / 2.0 - (1.0 + x) / 2.0 / c4;
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut guard = 0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Numeric("no bracket for the tangency root".into()));
        }
    }
    for _ in 0..400 {
        if hi - lo <= 1e-12 * lo {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numeric("tangency bisection did not converge".into()))
}

/// Point locator for the tiling with parameter `r`.
#[derive(Clone, Debug)]
pub struct Locator {
    lambda1: f64,
    lambda3: f64,
    x: f64,
    ln_x: f64,
}

impl Locator {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_nan() || r <= 0.0 {
            return Err(Error::Parameter(format!("tiling parameter r must be positive, got {r}")));
        }
        let x = solve_dilation(r)?;
        Ok(Locator {
            lambda1: r.sinh(),
            lambda3: (3.0 * r).sinh(),
            x,
            ln_x: x.ln(),
        })
    }

    /// Tile containing the point `(px, py)`. Points on a boundary go to the
    /// shallower tile, and B₁ precedes A precedes B within a frame.
    pub fn locate(&self, px: f64, py: f64) -> Option<TileKey> {
        let side = if px < 0.0 { Side::L } else { Side::R };
        let (mut x, mut y) = (px.abs(), py);
        let mut path: Vec<i32> = Vec::new();
        loop {
            if x <= self.lambda1 * y * (1.0 + TOL) {
                return Some(if path.is_empty() {
                    TileKey {
                        kind: TileKind::B1,
                        side: Side::R,
                        path,
                    }
                } else {
                    path.pop();
                    TileKey {
                        kind: TileKind::B,
                        side,
                        path,
                    }
                });
            }
            if x <= self.lambda3 * y * (1.0 + TOL) {
                return Some(TileKey {
                    kind: TileKind::A,
                    side,
                    path,
                });
            }
            let n = (x.ln() / self.ln_x).floor() as i32;
            let inside = (n - 1..=n + 1).find(|&m| {
                let a = self.x.powi(m);
                let b = a * self.x;
                let c = 0.5 * (a + b);
                let rad = 0.5 * (b - a);
                (x - c).powi(2) + y * y < rad * rad * (1.0 - TOL)
            });
            let Some(m) = inside else {
                return Some(TileKey {
                    kind: TileKind::B,
                    side,
                    path,
                });
            };
            if path.len() >= MAX_DEPTH {
                return None;
            }
            // z ↦ ψ₀⁻¹(z / xᵐ) with ψ₀⁻¹(w) = (w − 1)/(x − w).
            let s = self.x.powi(m);
            let (wr, wi) = (x / s, y / s);
            let (nr, ni) = (wr - 1.0, wi);
            let (dr, di) = (self.x - wr, -wi);
            let den = dr * dr + di * di;
            x = (nr * dr + ni * di) / den;
            y = (ni * dr - nr * di) / den;
            path.push(m);
        }
    }

    pub fn dilation(&self) -> f64 {
        self.x
    }

    /// `ψ_n = D_{xⁿ} ∘ ψ₀` as a normalized matrix.
    pub fn psi(&self, n: i32) -> Mobius {
        let s = self.x.powi(n);
        Mobius::from_matrix(self.x * s, s, 1.0, 1.0)
    }
}

/// Builds the tiling and lists the tiles meeting the window.
pub fn build_h2_tiling(r: f64, window: TilingWindow) -> Result<Tiling> {
    let loc = Locator::new(r)?;
    let lambda = [0.0, 1.0, 2.0, 3.0, 4.0].map(|k: f64| (k * r).sinh());
    let mut tiles = vec![Tile {
        key: TileKey {
            kind: TileKind::B1,
            side: Side::R,
            path: vec![],
        },
        transform: Mobius::identity(),
        depth: 0,
    }];
    let mut stack: Vec<(Side, Vec<i32>, Mobius)> = vec![
        (Side::L, vec![], Mobius::reflection()),
        (Side::R, vec![], Mobius::identity()),
    ];
    let (wc, wr) = euclidean_ball(&[window.center.0, window.center.1], window.radius);
    while let Some((side, path, g)) = stack.pop() {
        for kind in [TileKind::A, TileKind::B] {
            tiles.push(Tile {
                key: TileKey {
                    kind,
                    side,
                    path: path.clone(),
                },
                transform: g,
                depth: path.len(),
            });
        }
        if path.len() >= MAX_DEPTH {
            continue;
        }
        for n in child_range(&loc, &g, &window) {
            let a = g.apply_boundary(Some(loc.x.powi(n)));
            let b = g.apply_boundary(Some(loc.x.powi(n + 1)));
            let (Some(a), Some(b)) = (a, b) else { continue };
            let (lo, hi) = (a.min(b), a.max(b));
            let rad = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            let gap = ((mid - wc[0]).powi(2) + wc[1].powi(2)).sqrt();
            if rad < window.resolution || gap >= rad + wr {
                continue;
            }
            let mut p = path.clone();
            p.push(n);
            stack.push((side, p, g.compose(&loc.psi(n))));
        }
    }
    tiles.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(Tiling {
        r,
        lambda,
        dilation: loc.x,
        window,
        tiles,
    })
}

/// Semicircle indices of a frame that can meet the window.
fn child_range(loc: &Locator, g: &Mobius, window: &TilingWindow) -> std::ops::Range<i32> {
    // Work in the frame's own coordinates: pull the window back by g.
    let inv = g.inverse();
    let c = inv.apply(window.center.0, window.center.1);
    let (ec, er) = euclidean_ball(&[c.0, c.1], window.radius);
    let left = ec[0] - er;
    let right = ec[0] + er;
    let bottom = ec[1] - er;
    if right <= 0.0 {
        return 0..0;
    }
    // S_n has radius xⁿ(x − 1)/2 and must reach height `bottom`.
    let by_height = ((2.0 * bottom / (loc.x - 1.0)).ln() / loc.ln_x).floor() as i32 - 1;
    let by_left = if left > 0.0 {
        (left.ln() / loc.ln_x).floor() as i32 - 1
    } else {
        i32::MIN
    };
    let hi = (right.ln() / loc.ln_x).ceil() as i32 + 1;
    by_height.max(by_left)..hi + 1
}

/// Assigns every net point to its tile; pieces are the non-empty tiles in
/// depth-then-kind order, coloured A ↦ 0 and B, B₁ ↦ 1.
///
/// The claimed separation is `2r`, the distance between the closed tiles
/// of one colour.
pub fn tiling_to_decomposition(t: &Tiling, net: &SpaceGraph) -> Result<ColoredDecomposition> {
    let (keys, dec) = tile_pieces(t.r, net)?;
    let mut dec = dec;
    dec.labels = keys.iter().map(|k| k.label()).collect();
    Ok(dec)
}

/// Tile keys and the decomposition they induce on the net.
pub fn tile_pieces(r: f64, net: &SpaceGraph) -> Result<(Vec<TileKey>, ColoredDecomposition)> {
    if net.halfspace_dim() != Some(2) {
        return Err(Error::Parameter("tiling needs an ℍ² net".into()));
    }
    let loc = Locator::new(r)?;
    let mut groups: BTreeMap<TileKey, Vec<u32>> = BTreeMap::new();
    for i in 0..net.len() {
        let c = net.coords(i);
        let key = loc.locate(c[0], c[1]).ok_or(Error::Assignment { point: i })?;
        groups.entry(key).or_default().push(i as u32);
    }
    let keys: Vec<TileKey> = groups.keys().cloned().collect();
    let colour = keys.iter().map(|k| k.kind.colour()).collect();
    let mut dec = ColoredDecomposition::new(groups.into_values().collect(), colour, 2.0 * r);
    dec.d = 1;
    Ok((keys, dec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::h2_distance;

    #[test]
    fn dilation_matches_closed_form() {
        for r in [0.5, 1.0, 2.0] {
            let c = (4.0f64 * r).cosh();
            let closed = (c + 1.0) / (c - 1.0);
            let x = solve_dilation(r).unwrap();
            assert!((x - closed).abs() < 1e-11 * closed, "{x} {closed}");
        }
    }

    #[test]
    fn psi_maps_frame_onto_semicircle() {
        let loc = Locator::new(1.0).unwrap();
        let x = loc.dilation();
        let p = loc.psi(0);
        assert!((p.det() - 1.0).abs() < 1e-12);
        assert!((p.apply_boundary(Some(0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((p.apply_boundary(None).unwrap() - x).abs() < 1e-12);
        let (u, v) = p.apply(0.0, 1.0);
        assert!((u - 0.5 * (1.0 + x)).abs() < 1e-12);
        assert!((v - 0.5 * (x - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn transforms_have_unit_determinant() {
        let w = TilingWindow {
            center: (0.0, 1.0),
            radius: 6.0,
            resolution: 1e-6,
        };
        let t = build_h2_tiling(1.0, w).unwrap();
        assert!(t.tiles.len() > 3);
        for tile in &t.tiles {
            assert!((tile.transform.det() - 1.0).abs() < 1e-6);
            assert!(tile.transform.m.iter().flatten().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn locate_is_reflection_symmetric() {
        let loc = Locator::new(1.0).unwrap();
        for &(x, y) in &[(0.3, 1.0), (5.0, 1.0), (1.03, 0.01), (20.0, 0.5)] {
            let a = loc.locate(x, y).unwrap();
            let b = loc.locate(-x, y).unwrap();
            assert_eq!(a.kind, b.kind);
            assert_eq!(a.path, b.path);
        }
    }

    #[test]
    fn frame_images_locate_consistently() {
        // A point located in frame coordinates keeps its tile kind when
        // pushed through ψ_n, one level deeper.
        let loc = Locator::new(1.0).unwrap();
        for n in [-3, 0, 2] {
            let g = loc.psi(n);
            for &(x, y) in &[(5.0, 1.0), (2.0, 1.0), (50.0, 1.0)] {
                let k = loc.locate(x, y).unwrap();
                let (u, v) = g.apply(x, y);
                let k2 = loc.locate(u, v).unwrap();
                assert_eq!(k2.kind, k.kind);
                assert_eq!(k2.path.len(), k.path.len() + 1);
                assert_eq!(k2.path[0], n);
            }
        }
        assert!(h2_distance(1.0, 1.0, 1.0, 1.0) == 0.0);
    }
}
