//! Builders for the concrete windows: nets, combs, subtrees and products.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::comb::{comb_neighbors, comb_size, comb_vertices};
use super::index::DynamicIndex;
use super::tree::{ball_words, Word};
use super::{to_csr, Adjacency, Points, SpaceGraph, Window};
use crate::error::{Error, Result};
use crate::hyperbolic::{euclidean_ball, hd_distance};

/// Largest product or comb that will be materialized.
pub const PRODUCT_CAP: u128 = 20_000_000;

/// Horizontal spacing of the half-space candidate grid, in units of
/// `sep · y`.
pub const GRID_WIDTH: f64 = 2.0;

/// The model space a net discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Z,
    T3,
    /// Hyperbolic space ℍ^d in the upper half-space model.
    H(usize),
}

/// Generates a maximal `sep`-separated net of `window` among the model's
/// candidate stream, with edges between points at distance ≤ `edge_threshold`.
pub fn generate_net(model: Model, window: &Window, sep: f64, edge_threshold: f64) -> Result<SpaceGraph> {
    if sep.is_nan() || sep <= 0.0 {
        return Err(Error::Parameter(format!("separation must be positive, got {sep}")));
    }
    match (model, window) {
        (Model::Z, Window::Interval { lo, hi }) => integer_net(*lo, *hi, sep, edge_threshold),
        (Model::T3, Window::TreeBall { radius }) => tree_ball(*radius, sep),
        (Model::H(d), Window::HyperbolicBall { center, radius }) => {
            halfspace_net(d, center, *radius, sep, edge_threshold)
        }
        _ => Err(Error::Parameter(format!(
            "window {window:?} does not fit model {model:?}"
        ))),
    }
}

fn integer_net(lo: i64, hi: i64, sep: f64, thr: f64) -> Result<SpaceGraph> {
    if lo > hi {
        return Err(Error::EmptySpace(format!("interval [{lo}, {hi}]")));
    }
    let step = (sep.ceil() as i64).max(1);
    let pts: Vec<i64> = (lo..=hi).step_by(step as usize).collect();
    let reach = (thr / step as f64).floor() as usize;
    let adj: Vec<Vec<u32>> = (0..pts.len())
        .map(|i| {
            let a = i.saturating_sub(reach);
            let b = (i + reach).min(pts.len() - 1);
            (a..=b).filter(|&j| j != i).map(|j| j as u32).collect()
        })
        .collect();
    let (offsets, targets) = to_csr(&adj);
    Ok(SpaceGraph::new(
        "z",
        Points::Integer(pts),
        Adjacency::Csr { offsets, targets },
        step as f64,
        thr,
        Window::Interval { lo, hi },
    ))
}

fn tree_ball(radius: u32, sep: f64) -> Result<SpaceGraph> {
    if sep > 1.0 {
        return Err(Error::Parameter(
            "tree nets are the full vertex set; separation must be ≤ 1".into(),
        ));
    }
    let size = super::tree::ball_count(radius) as u128;
    if size > PRODUCT_CAP {
        return Err(Error::SizeCap {
            what: "tree ball".into(),
            size,
            cap: PRODUCT_CAP,
        });
    }
    let words = ball_words(radius);
    let mut s = subtree_space(words);
    s.window = Window::TreeBall { radius };
    s.name = "t3".into();
    Ok(s)
}

/// A finite subtree of T₃ given by its vertex words; two words are adjacent
/// when one extends the other by a letter.
pub fn subtree_space(words: Vec<Word>) -> SpaceGraph {
    let pos: HashMap<&[u8], u32> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (&w[..], i as u32))
        .collect();
    let mut adj = vec![Vec::new(); words.len()];
    for (i, w) in words.iter().enumerate() {
        if let Some((_, parent)) = w.split_last() {
            if let Some(&p) = pos.get(parent) {
                adj[i].push(p);
                adj[p as usize].push(i as u32);
            }
        }
    }
    drop(pos);
    for l in &mut adj {
        l.sort_unstable();
    }
    let (offsets, targets) = to_csr(&adj);
    SpaceGraph::new(
        "t3-subtree",
        Points::Tree(words),
        Adjacency::Csr { offsets, targets },
        1.0,
        1.0,
        Window::Subtree,
    )
}

fn halfspace_net(d: usize, center: &[f64], radius: f64, sep: f64, thr: f64) -> Result<SpaceGraph> {
    if d < 2 || center.len() != d || center[d - 1] <= 0.0 {
        return Err(Error::Parameter(format!(
            "ℍ^{d} window centre must have {d} coordinates with y > 0"
        )));
    }
    if d > 3 {
        return Err(Error::Parameter("half-space nets are implemented for d ≤ 3".into()));
    }
    if thr < 2.0 * sep {
        return Err(Error::Parameter(format!(
            "edge threshold {thr} below twice the separation {sep}"
        )));
    }
    let h = sep / 2.0;
    let cell = 2.0 * sep;
    let (ec, erad) = euclidean_ball(center, radius);
    let cy = ec[d - 1];
    let k0 = ((cy - erad).max(f64::MIN_POSITIVE).ln() / h).floor() as i64;
    let k1 = ((cy + erad).ln() / h).ceil() as i64;
    let mut coords: Vec<f64> = Vec::new();
    let mut dynamic = DynamicIndex::default();
    let mut cand = vec![0.0; d];
    for k in k0..=k1 {
        let y = (k as f64 * h).exp();
        let dy = y - cy;
        if dy.abs() > erad {
            continue;
        }
        let rh = (erad * erad - dy * dy).sqrt();
        let w = GRID_WIDTH * sep * y;
        let off = if k.rem_euclid(2) == 1 { 0.5 * w } else { 0.0 };
        let range = |c: f64| {
            (
                ((c - rh - off) / w).floor() as i64,
                ((c + rh - off) / w).ceil() as i64,
            )
        };
        let (i0, i1) = range(ec[0]);
        let (j0, j1) = if d == 3 { range(ec[1]) } else { (0, 0) };
        for i in i0..=i1 {
            for j in j0..=j1 {
                cand[0] = i as f64 * w + off;
                if d == 3 {
                    cand[1] = j as f64 * w + off;
                }
                cand[d - 1] = y;
                if hd_distance(center, &cand) > radius {
                    continue;
                }
                if !dynamic.any_closer(d, h, cell, &coords, &cand, sep) {
                    let id = (coords.len() / d) as u32;
                    coords.extend_from_slice(&cand);
                    dynamic.insert(d, h, cell, &cand, id);
                }
            }
        }
    }
    drop(dynamic);
    if coords.is_empty() {
        return Err(Error::EmptySpace(format!(
            "hyperbolic ball of radius {radius} holds no net point"
        )));
    }
    let window = Window::HyperbolicBall {
        center: center.to_vec(),
        radius,
    };
    let name = format!("h{d}");
    let probe = SpaceGraph::new(
        &name,
        Points::HalfSpace { dim: d, coords },
        Adjacency::Proximity,
        sep,
        thr,
        window,
    );
    let n = probe.len();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets: Vec<u32> = Vec::new();
    let mut row: Vec<u32> = Vec::new();
    offsets.push(0);
    for i in 0..n {
        row.clear();
        probe.for_each_neighbor(i, |j| row.push(j as u32));
        row.sort_unstable();
        targets.extend_from_slice(&row);
        offsets.push(targets.len());
    }
    targets.shrink_to_fit();
    let mut s = probe;
    s.degree_bound = offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
    s.adjacency = Adjacency::Csr { offsets, targets };
    Ok(s)
}

/// The comb `C_d` truncated at `extent`.
pub fn build_comb(d: u32, extent: u32) -> Result<SpaceGraph> {
    if d < 1 || extent < 1 {
        return Err(Error::Parameter("comb needs d ≥ 1 and extent ≥ 1".into()));
    }
    let size = comb_size(d, extent);
    if size > PRODUCT_CAP {
        return Err(Error::SizeCap {
            what: format!("comb C_{d}"),
            size,
            cap: PRODUCT_CAP,
        });
    }
    let addrs = comb_vertices(d, extent);
    let pos: HashMap<_, u32> = addrs.iter().cloned().zip(0..).collect();
    let adj: Vec<Vec<u32>> = addrs
        .iter()
        .map(|a| {
            let mut v: Vec<u32> = comb_neighbors(a, d, extent).iter().map(|b| pos[b]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    drop(pos);
    let (offsets, targets) = to_csr(&adj);
    Ok(SpaceGraph::new(
        format!("comb{d}"),
        Points::Comb { d, addrs },
        Adjacency::Csr { offsets, targets },
        1.0,
        1.0,
        Window::Comb { d, extent },
    ))
}

/// ℓ¹-product of the given windows, with the full Cartesian product as its
/// window.
pub fn build_product(spaces: &[Arc<SpaceGraph>]) -> Result<SpaceGraph> {
    build_product_capped(spaces, PRODUCT_CAP)
}

pub fn build_product_capped(spaces: &[Arc<SpaceGraph>], cap: u128) -> Result<SpaceGraph> {
    if spaces.is_empty() {
        return Err(Error::Parameter("product of no factors".into()));
    }
    let mut size: u128 = 1;
    for s in spaces {
        if s.is_empty() {
            return Err(Error::EmptySpace(format!("factor {}", s.name)));
        }
        size *= s.len() as u128;
    }
    if size > cap {
        return Err(Error::SizeCap {
            what: "product".into(),
            size,
            cap,
        });
    }
    let sep = spaces.iter().map(|s| s.separation).fold(f64::INFINITY, f64::min);
    let thr = spaces.iter().map(|s| s.edge_threshold).fold(0.0, f64::max);
    let name = spaces.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join("x");
    let window = Window::Product {
        factors: spaces.iter().map(|s| s.window.clone()).collect(),
    };
    Ok(SpaceGraph::new(
        name,
        Points::Product {
            factors: spaces.to_vec(),
        },
        Adjacency::Product,
        sep,
        thr,
        window,
    ))
}
