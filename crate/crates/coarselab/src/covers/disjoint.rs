use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ColoredDecomposition, Cover, Membership};
use crate::spaces::SpaceGraph;

/// Metric used for balls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Shortest-path metric of the window graph.
    Graph,
    /// Distance of the continuous model space.
    Model,
}

/// Maximum number of pieces met by a closed ball, with a witnessing centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub value: usize,
    pub center: usize,
    pub pieces: Vec<u32>,
}

/// Same-colour pair of pieces closer than the decomposition's `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub points: (usize, usize),
}

fn ball(space: &SpaceGraph, x: usize, radius: f64, metric: Metric) -> Vec<usize> {
    match metric {
        Metric::Model => space.within(x, radius),
        Metric::Graph => {
            let r = (radius + 1e-9).floor();
            if r < 0.0 {
                Vec::new()
            } else {
                space.bfs_ball(x, r as u32, None)
            }
        }
    }
}

/// Exact `R`-multiplicity: the largest number of pieces met by a closed ball
/// of radius `R` about a point of the window.
pub fn r_multiplicity(space: &SpaceGraph, cover: &Cover, radius: f64, metric: Metric) -> Multiplicity {
    let mem = cover.membership(space);
    let mut best = Multiplicity {
        value: 0,
        center: 0,
        pieces: Vec::new(),
    };
    let mut stamp = vec![usize::MAX; cover.len()];
    for x in 0..space.len() {
        let mut met = Vec::new();
        for y in ball(space, x, radius, metric) {
            for &p in mem.of(y) {
                if stamp[p as usize] != x {
                    stamp[p as usize] = x;
                    met.push(p);
                }
            }
        }
        if met.len() > best.value {
            met.sort_unstable();
            best = Multiplicity {
                value: met.len(),
                center: x,
                pieces: met,
            };
        }
    }
    best
}

/// Same-colour piece pairs at model distance below `decomp.r`.
///
/// Each violating pair is reported once, with its smallest achieved
/// distance and a witnessing point pair.
pub fn check_disjointness(space: &SpaceGraph, decomp: &ColoredDecomposition) -> Vec<Violation> {
    let found = close_pairs(space, decomp, decomp.r, true);
    found
        .into_iter()
        .map(|((a, b), (distance, points))| Violation {
            a,
            b,
            distance,
            points,
        })
        .collect()
}

/// Smallest model distance between distinct same-colour pieces, searched
/// up to `search_radius`; `None` when no pair is that close.
pub fn min_same_colour_distance(
    space: &SpaceGraph,
    decomp: &ColoredDecomposition,
    search_radius: f64,
) -> Option<f64> {
    close_pairs(space, decomp, search_radius, false)
        .values()
        .map(|v| v.0)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))))
}

type PairMap = BTreeMap<(usize, usize), (f64, (usize, usize))>;

fn close_pairs(space: &SpaceGraph, decomp: &ColoredDecomposition, radius: f64, strict: bool) -> PairMap {
    let mem: Membership = decomp.membership(space);
    let mut out: PairMap = BTreeMap::new();
    for x in 0..space.len() {
        let here = mem.of(x);
        if here.is_empty() {
            continue;
        }
        space.for_each_within(x, radius, |y| {
            if y < x {
                return;
            }
            let dxy = if x == y { 0.0 } else { space.dist(x, y) };
            if strict && dxy >= radius - 1e-9 {
                return;
            }
            for &a in here {
                for &b in mem.of(y) {
                    if a == b || decomp.colour[a as usize] != decomp.colour[b as usize] {
                        continue;
                    }
                    let key = (a.min(b) as usize, a.max(b) as usize);
                    let e = out.entry(key).or_insert((f64::INFINITY, (x, y)));
                    if dxy < e.0 {
                        *e = (dxy, (x, y));
                    }
                }
            }
        });
    }
    out
}
