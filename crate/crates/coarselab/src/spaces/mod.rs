//! Finite bounded-degree graph windows onto ℍ^d, T₃, ℤ, combs and
//! ℓ¹-products.
//!
//! A [`SpaceGraph`] couples a point set carrying model coordinates with a
//! graph whose edges join points at model distance at most the edge
//! threshold. Discrete models (ℤ, T₃, combs) use their own path metric as
//! the model metric with threshold 1.

pub mod comb;
pub mod index;
mod net;
pub mod tree;

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::hd_distance;
pub use comb::CombAddr;
pub use index::LayerIndex;
pub use net::{
    build_comb, build_product, build_product_capped, generate_net, subtree_space, Model, GRID_WIDTH,
    PRODUCT_CAP,
};

/// A point of one of the model spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelPoint {
    HalfPlane { x: f64, y: f64 },
    HalfSpace { x: Vec<f64>, y: f64 },
    TreeAddress { word: Vec<u8> },
    Integer { n: i64 },
    CombNode { level: u32, base: i64, offsets: Vec<u32> },
    Tuple { parts: Vec<ModelPoint> },
    Abstract { id: usize },
}

/// The region of the model space covered by a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    Interval { lo: i64, hi: i64 },
    TreeBall { radius: u32 },
    /// A finite subtree of T₃; vertices of degree < 3 are boundary.
    Subtree,
    HyperbolicBall { center: Vec<f64>, radius: f64 },
    Comb { d: u32, extent: u32 },
    Product { factors: Vec<Window> },
    Finite,
}

/// Storage of the point payloads, one variant per model.
#[derive(Clone, Debug)]
pub enum Points {
    /// Row-major coordinates `(x_1, …, x_{dim-1}, y)`.
    HalfSpace { dim: usize, coords: Vec<f64> },
    Tree(Vec<tree::Word>),
    Integer(Vec<i64>),
    Comb { d: u32, addrs: Vec<CombAddr> },
    /// Full Cartesian product, indexed in mixed radix (last factor fastest).
    Product { factors: Vec<Arc<SpaceGraph>> },
    /// A finite metric given by its distance matrix.
    Abstract { n: usize, dist: Vec<u32> },
}

#[derive(Clone, Debug)]
pub enum Adjacency {
    Csr { offsets: Vec<usize>, targets: Vec<u32> },
    /// Neighbours computed on demand from the spatial index.
    Proximity,
    /// Neighbours of product tuples computed from the factors.
    Product,
}

/// A finite window onto a model space.
#[derive(Clone, Debug)]
pub struct SpaceGraph {
    pub name: String,
    pub points: Points,
    pub adjacency: Adjacency,
    pub separation: f64,
    pub edge_threshold: f64,
    pub window: Window,
    pub degree_bound: usize,
    margins: Option<Vec<f64>>,
    index: Option<LayerIndex>,
}

/// A graph ball together with its truncation flag.
#[derive(Clone, Debug, PartialEq)]
pub struct BallResult {
    pub points: Vec<usize>,
    pub truncated: bool,
}

impl SpaceGraph {
    pub(crate) fn new(
        name: impl Into<String>,
        points: Points,
        adjacency: Adjacency,
        separation: f64,
        edge_threshold: f64,
        window: Window,
    ) -> Self {
        let mut s = SpaceGraph {
            name: name.into(),
            points,
            adjacency,
            separation,
            edge_threshold,
            window,
            degree_bound: 0,
            margins: None,
            index: None,
        };
        if let Points::HalfSpace { dim, coords } = &s.points {
            let h = separation / 2.0;
            s.index = Some(LayerIndex::build(*dim, h, 2.0 * separation, coords));
        }
        s.degree_bound = s.compute_degree_bound();
        s.margins = s.compute_margins();
        s
    }

    /// Builds a space from an explicit symmetric edge list; the model metric
    /// is the shortest-path metric of the graph.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace("abstract graph with no vertices".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Index {
                    index: a.max(b),
                    len: n,
                });
            }
            if a != b && !adj[a].contains(&(b as u32)) {
                adj[a].push(b as u32);
                adj[b].push(a as u32);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        let (offsets, targets) = to_csr(&adj);
        let mut dist = vec![u32::MAX; n * n];
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            row[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &v in &targets[offsets[u]..offsets[u + 1]] {
                    let v = v as usize;
                    if row[v] == u32::MAX {
                        row[v] = row[u] + 1;
                        q.push_back(v);
                    }
                }
            }
        }
        Ok(SpaceGraph::new(
            "abstract",
            Points::Abstract { n, dist },
            Adjacency::Csr { offsets, targets },
            1.0,
            1.0,
            Window::Finite,
        ))
    }

    pub fn len(&self) -> usize {
        match &self.points {
            Points::HalfSpace { dim, coords } => coords.len() / dim,
            Points::Tree(w) => w.len(),
            Points::Integer(v) => v.len(),
            Points::Comb { addrs, .. } => addrs.len(),
            Points::Product { factors } => factors.iter().map(|f| f.len()).product(),
            Points::Abstract { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::Index {
                index: i,
                len: self.len(),
            })
        }
    }

    /// Dimension `d` of the half-space model, if this is one.
    pub fn halfspace_dim(&self) -> Option<usize> {
        match &self.points {
            Points::HalfSpace { dim, .. } => Some(*dim),
            _ => None,
        }
    }

    /// Coordinates of a half-space point.
    pub fn coords(&self, i: usize) -> &[f64] {
        match &self.points {
            Points::HalfSpace { dim, coords } => &coords[i * dim..(i + 1) * dim],
            _ => panic!("coords() called on a non-hyperbolic space"),
        }
    }

    pub fn index(&self) -> Option<&LayerIndex> {
        self.index.as_ref()
    }

    /// Factor indices of a product point.
    pub fn tuple(&self, i: usize) -> Vec<usize> {
        match &self.points {
            Points::Product { factors } => {
                let mut out = vec![0; factors.len()];
                let mut rest = i;
                for (k, f) in factors.iter().enumerate().rev() {
                    out[k] = rest % f.len();
                    rest /= f.len();
                }
                out
            }
            _ => vec![i],
        }
    }

    /// Inverse of [`SpaceGraph::tuple`].
    pub fn tuple_index(&self, parts: &[usize]) -> usize {
        match &self.points {
            Points::Product { factors } => {
                let mut i = 0;
                for (k, f) in factors.iter().enumerate() {
                    i = i * f.len() + parts[k];
                }
                i
            }
            _ => parts[0],
        }
    }

    pub fn factors(&self) -> Option<&[Arc<SpaceGraph>]> {
        match &self.points {
            Points::Product { factors } => Some(factors),
            _ => None,
        }
    }

    pub fn point(&self, i: usize) -> ModelPoint {
        match &self.points {
            Points::HalfSpace { dim, coords } => {
                let c = &coords[i * dim..(i + 1) * dim];
                if *dim == 2 {
                    ModelPoint::HalfPlane { x: c[0], y: c[1] }
                } else {
                    ModelPoint::HalfSpace {
                        x: c[..dim - 1].to_vec(),
                        y: c[dim - 1],
                    }
                }
            }
            Points::Tree(w) => ModelPoint::TreeAddress { word: w[i].to_vec() },
            Points::Integer(v) => ModelPoint::Integer { n: v[i] },
            Points::Comb { addrs, .. } => ModelPoint::CombNode {
                level: addrs[i].level() as u32,
                base: addrs[i].base,
                offsets: addrs[i].offsets.clone(),
            },
            Points::Product { factors } => ModelPoint::Tuple {
                parts: self
                    .tuple(i)
                    .into_iter()
                    .zip(factors)
                    .map(|(j, f)| f.point(j))
                    .collect(),
            },
            Points::Abstract { .. } => ModelPoint::Abstract { id: i },
        }
    }

    /// Model-space distance between two points.
    pub fn model_distance(&self, p: usize, q: usize) -> Result<f64> {
        self.check_index(p)?;
        self.check_index(q)?;
        Ok(self.dist(p, q))
    }

    /// Unchecked [`SpaceGraph::model_distance`].
    pub fn dist(&self, p: usize, q: usize) -> f64 {
        match &self.points {
            Points::HalfSpace { dim, coords } => {
                if p == q {
                    0.0
                } else {
                    hd_distance(&coords[p * dim..(p + 1) * dim], &coords[q * dim..(q + 1) * dim])
                }
            }
            Points::Tree(w) => tree::word_distance(&w[p], &w[q]) as f64,
            Points::Integer(v) => (v[p] - v[q]).unsigned_abs() as f64,
            Points::Comb { addrs, .. } => comb::comb_distance(&addrs[p], &addrs[q]) as f64,
            Points::Product { factors } => {
                let a = self.tuple(p);
                let b = self.tuple(q);
                factors
                    .iter()
                    .enumerate()
                    .map(|(k, f)| f.dist(a[k], b[k]))
                    .sum()
            }
            Points::Abstract { n, dist } => {
                let d = dist[p * n + q];
                if d == u32::MAX {
                    f64::INFINITY
                } else {
                    d as f64
                }
            }
        }
    }

    /// True when the model metric coincides with the graph metric.
    pub fn graph_exact(&self) -> bool {
        match &self.points {
            Points::HalfSpace { .. } => false,
            Points::Product { factors } => factors.iter().all(|f| f.graph_exact()),
            _ => true,
        }
    }

    /// Calls `f` on each graph neighbour of `i`.
    pub fn for_each_neighbor(&self, i: usize, mut f: impl FnMut(usize)) {
        match &self.adjacency {
            Adjacency::Csr { offsets, targets } => {
                for &t in &targets[offsets[i]..offsets[i + 1]] {
                    f(t as usize);
                }
            }
            Adjacency::Proximity => {
                let index = self.index.as_ref().expect("proximity adjacency needs an index");
                let Points::HalfSpace { coords, .. } = &self.points else {
                    unreachable!()
                };
                index.for_each_within(coords, self.coords(i), self.edge_threshold, |j| {
                    if j != i {
                        f(j)
                    }
                });
            }
            Adjacency::Product => {
                let Points::Product { factors } = &self.points else {
                    unreachable!()
                };
                let parts = self.tuple(i);
                let mut stride = 1;
                let mut strides = vec![0; factors.len()];
                for k in (0..factors.len()).rev() {
                    strides[k] = stride;
                    stride *= factors[k].len();
                }
                for (k, fac) in factors.iter().enumerate() {
                    for j in fac.neighbors(parts[k]) {
                        f(i - parts[k] * strides[k] + j * strides[k]);
                    }
                }
            }
        }
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut v = Vec::new();
        self.for_each_neighbor(i, |j| v.push(j));
        v.sort_unstable();
        v
    }

    pub fn degree(&self, i: usize) -> usize {
        let mut c = 0;
        self.for_each_neighbor(i, |_| c += 1);
        c
    }

    fn compute_degree_bound(&self) -> usize {
        match &self.adjacency {
            Adjacency::Csr { offsets, .. } => {
                offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
            }
            Adjacency::Product => self
                .factors()
                .map(|f| f.iter().map(|g| g.degree_bound).sum())
                .unwrap_or(0),
            Adjacency::Proximity => {
                // Packing bound: disjoint balls of radius sep/2 around the
                // neighbours fit inside the ball of radius thr + sep/2.
                let d = self.halfspace_dim().unwrap_or(2);
                let a = self.separation / 2.0;
                let b = self.edge_threshold + a;
                (hyperbolic_ball_volume(d, b) / hyperbolic_ball_volume(d, a)).floor() as usize
            }
        }
    }

    /// Model distance from a point to the boundary of the window.
    pub fn margin(&self, i: usize) -> f64 {
        if let Some(m) = &self.margins {
            return m[i];
        }
        match &self.window {
            Window::HyperbolicBall { center, radius } => radius - hd_distance(center, self.coords(i)),
            Window::Product { .. } => {
                let Points::Product { factors } = &self.points else {
                    return f64::INFINITY;
                };
                self.tuple(i)
                    .into_iter()
                    .zip(factors)
                    .map(|(j, f)| f.margin(j))
                    .fold(f64::INFINITY, f64::min)
            }
            Window::Interval { lo, hi } => {
                let Points::Integer(v) = &self.points else {
                    return f64::INFINITY;
                };
                ((v[i] - lo).min(hi - v[i])) as f64
            }
            Window::TreeBall { radius } => {
                let Points::Tree(w) = &self.points else {
                    return f64::INFINITY;
                };
                (*radius as usize - w[i].len()) as f64
            }
            _ => f64::INFINITY,
        }
    }

    /// Precomputes margins for windows whose boundary is a vertex set.
    fn compute_margins(&self) -> Option<Vec<f64>> {
        let boundary: Vec<bool> = match (&self.window, &self.points) {
            (Window::Comb { extent, .. }, Points::Comb { addrs, .. }) => addrs
                .iter()
                .map(|a| comb::is_truncated_end(a, *extent))
                .collect(),
            (Window::Subtree, Points::Tree(w)) => (0..w.len()).map(|i| self.degree(i) < 3).collect(),
            _ => return None,
        };
        let n = boundary.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut q = VecDeque::new();
        for (i, &b) in boundary.iter().enumerate() {
            if b {
                dist[i] = 0.0;
                q.push_back(i);
            }
        }
        while let Some(u) = q.pop_front() {
            let du = dist[u];
            self.for_each_neighbor(u, |v| {
                if dist[v].is_infinite() {
                    dist[v] = du + 1.0;
                    q.push_back(v);
                }
            });
        }
        Some(dist)
    }

    /// Calls `f` on every point within closed model distance `rho` of `i`.
    pub fn for_each_within(&self, i: usize, rho: f64, mut f: impl FnMut(usize)) {
        match &self.points {
            Points::HalfSpace { coords, .. } => {
                let index = self.index.as_ref().expect("half-space spaces are indexed");
                index.for_each_within(coords, self.coords(i), rho, f);
            }
            Points::Abstract { n, dist } => {
                for j in 0..*n {
                    if (dist[i * n + j] as f64) <= rho + 1e-9 {
                        f(j);
                    }
                }
            }
            Points::Product { factors } => {
                let parts = self.tuple(i);
                let mut cur = vec![0usize; factors.len()];
                product_within(self, factors, &parts, 0, rho, &mut cur, &mut f);
            }
            _ => {
                // Graph-exact models: the model ball is the graph ball.
                let r = (rho + 1e-9).floor();
                if r < 0.0 {
                    return;
                }
                for p in self.bfs_ball(i, r as u32, None) {
                    f(p);
                }
            }
        }
    }

    /// Points within closed model distance `rho` of `i`, sorted.
    pub fn within(&self, i: usize, rho: f64) -> Vec<usize> {
        let mut v = Vec::new();
        self.for_each_within(i, rho, |j| v.push(j));
        v.sort_unstable();
        v
    }

    /// Breadth-first ball of graph radius `r`, optionally restricted to a mask.
    pub fn bfs_ball(&self, center: usize, r: u32, mask: Option<&[bool]>) -> Vec<usize> {
        let mut out = Vec::new();
        bfs_layers(self, &[center], mask, Some(r), |v, _| out.push(v));
        out
    }

    /// Exact closed graph ball `B(center, r)` with truncation flag.
    pub fn ball(&self, center: usize, r: u32) -> Result<BallResult> {
        self.check_index(center)?;
        let mut points = Vec::new();
        let mut truncated = false;
        let thr = self.edge_threshold;
        bfs_layers(self, &[center], None, Some(r), |v, d| {
            points.push(v);
            if d == r && self.margin(v) < thr {
                truncated = true;
            }
        });
        points.sort_unstable();
        Ok(BallResult { points, truncated })
    }

    /// Euclidean-style summary: point count and degree histogram.
    pub fn degree_histogram(&self) -> Vec<usize> {
        let mut hist = Vec::new();
        for i in 0..self.len() {
            let d = self.degree(i);
            if hist.len() <= d {
                hist.resize(d + 1, 0);
            }
            hist[d] += 1;
        }
        hist
    }

    /// Edge list `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            self.for_each_neighbor(i, |j| {
                if i < j {
                    out.push((i, j))
                }
            });
        }
        out.sort_unstable();
        out
    }

    /// The point nearest the window's natural centre: the ball centre, the
    /// integer 0, the tree root or the comb origin. Ties go to the lower
    /// index.
    pub fn basepoint(&self) -> usize {
        let argmin = |key: &dyn Fn(usize) -> f64| {
            (0..self.len())
                .min_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)))
                .unwrap_or(0)
        };
        match (&self.window, &self.points) {
            (Window::HyperbolicBall { center, .. }, Points::HalfSpace { coords, .. }) => self
                .index
                .as_ref()
                .and_then(|ix| ix.nearest(coords, center, f64::INFINITY))
                .map(|(i, _)| i)
                .unwrap_or(0),
            (_, Points::Integer(v)) => argmin(&|i| v[i].unsigned_abs() as f64),
            (_, Points::Tree(w)) => argmin(&|i| w[i].len() as f64),
            (_, Points::Comb { addrs, .. }) => {
                argmin(&|i| (addrs[i].base.unsigned_abs() + addrs[i].offsets.iter().map(|&o| o as u64).sum::<u64>()) as f64)
            }
            (_, Points::Product { factors }) => {
                let parts: Vec<usize> = factors.iter().map(|f| f.basepoint()).collect();
                self.tuple_index(&parts)
            }
            _ => 0,
        }
    }

    /// Points of the space nearest to the window centre, first by margin.
    pub fn most_central(&self, candidates: &[usize]) -> Option<usize> {
        candidates.iter().copied().max_by(|&a, &b| {
            self.margin(a)
                .partial_cmp(&self.margin(b))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.cmp(&a))
        })
    }
}

fn product_within(
    space: &SpaceGraph,
    factors: &[Arc<SpaceGraph>],
    parts: &[usize],
    k: usize,
    budget: f64,
    cur: &mut Vec<usize>,
    f: &mut dyn FnMut(usize),
) {
    if k == factors.len() {
        f(space.tuple_index(cur));
        return;
    }
    let fac = &factors[k];
    for j in fac.within(parts[k], budget) {
        cur[k] = j;
        let rest = budget - fac.dist(parts[k], j);
        product_within(space, factors, parts, k + 1, rest, cur, f);
    }
}

/// Multi-source BFS that reports each reached vertex with its hop distance.
/// Vertices outside `mask` are neither visited nor traversed.
pub fn bfs_layers(
    space: &SpaceGraph,
    sources: &[usize],
    mask: Option<&[bool]>,
    max_r: Option<u32>,
    visit: impl FnMut(usize, u32),
) {
    bfs_layers_with(space, sources, |v| mask.is_none_or(|m| m[v]), max_r, visit)
}

/// [`bfs_layers`] with membership given by a predicate.
pub fn bfs_layers_with(
    space: &SpaceGraph,
    sources: &[usize],
    member: impl Fn(usize) -> bool,
    max_r: Option<u32>,
    mut visit: impl FnMut(usize, u32),
) {
    let mut seen = vec![false; space.len()];
    let mut frontier = Vec::new();
    for &s in sources {
        if member(s) && !seen[s] {
            seen[s] = true;
            frontier.push(s);
        }
    }
    frontier.sort_unstable();
    for &s in &frontier {
        visit(s, 0);
    }
    let mut d = 0;
    while !frontier.is_empty() && max_r.is_none_or(|r| d < r) {
        d += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            space.for_each_neighbor(u, |v| {
                if !seen[v] && member(v) {
                    seen[v] = true;
                    next.push(v);
                }
            });
        }
        next.sort_unstable();
        for &v in &next {
            visit(v, d);
        }
        frontier = next;
    }
}

/// Graph distances from `source` to every vertex (`u32::MAX` if unreachable).
pub fn bfs_distances(space: &SpaceGraph, source: usize, mask: Option<&[bool]>) -> Vec<u32> {
    let mut dist = vec![u32::MAX; space.len()];
    bfs_layers(space, &[source], mask, None, |v, d| dist[v] = d);
    dist
}

pub(crate) fn to_csr(adj: &[Vec<u32>]) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = Vec::with_capacity(adj.len() + 1);
    let mut targets = Vec::new();
    offsets.push(0);
    for l in adj {
        targets.extend_from_slice(l);
        offsets.push(targets.len());
    }
    (offsets, targets)
}

/// Volume of a hyperbolic ball of radius `r` in ℍ^d for d = 2, 3.
pub fn hyperbolic_ball_volume(d: usize, r: f64) -> f64 {
    match d {
        2 => 2.0 * std::f64::consts::PI * (r.cosh() - 1.0),
        3 => std::f64::consts::PI * ((2.0 * r).sinh() - 2.0 * r),
        _ => {
            // ω_{d-1} ∫ sinh^{d-1}, by the trapezoid rule.
            let steps = 2000;
            let h = r / steps as f64;
            let mut s = 0.0;
            for k in 0..=steps {
                let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
                s += w * (k as f64 * h).sinh().powi(d as i32 - 1);
            }
            let omega = 2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half(d);
            omega * s * h
        }
    }
}

/// Γ(d/2) for positive integers d.
fn gamma_half(d: usize) -> f64 {
    if d.is_multiple_of(2) {
        (1..d / 2).map(|k| k as f64).product()
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        let mut x = 0.5;
        while x < d as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}
