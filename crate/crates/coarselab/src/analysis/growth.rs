use serde::{Deserialize, Serialize};

use super::ols;
use crate::error::{Error, Result};
use crate::spaces::SpaceGraph;

/// Ball cardinalities about a centre, in the graph metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub center: usize,
    pub radii: Vec<u32>,
    pub counts: Vec<u64>,
    /// `truncated[k]` is set once some point within distance `radii[k]`
    /// lies closer than the edge threshold to the window boundary.
    pub truncated: Vec<bool>,
    pub fitted_exponent: Option<f64>,
    pub fit_residual: Option<f64>,
    pub subexp_stat: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    /// Root mean square residual of the log-log fit.
    pub residual: f64,
    pub points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubexpStat {
    /// `log(count(r_max)) / r_max` over untruncated radii.
    pub ratio: f64,
    /// Slope of `log count` against `r` over the upper half of the radii.
    pub tail_slope: f64,
    /// Tail slope below [`SUBEXP_SLOPE`].
    pub consistent: bool,
}

/// Tail slope under which growth is reported as consistent with
/// subexponential at window scale.
pub const SUBEXP_SLOPE: f64 = 0.05;

impl GrowthReport {
    /// Report from raw counts for radii `0, 1, …`.
    pub fn from_counts(center: usize, counts: Vec<u64>, truncated: Vec<bool>) -> Self {
        GrowthReport {
            center,
            radii: (0..counts.len() as u32).collect(),
            counts,
            truncated,
            fitted_exponent: None,
            fit_residual: None,
            subexp_stat: None,
        }
    }

    /// Untruncated `(r, count)` pairs with `r ≥ max(r_min, 1)`.
    pub fn usable(&self, r_min: u32) -> Vec<(u32, u64)> {
        self.radii
            .iter()
            .zip(&self.counts)
            .zip(&self.truncated)
            .filter(|((&r, _), &t)| !t && r >= r_min.max(1))
            .map(|((&r, &c), _)| (r, c))
            .collect()
    }

    /// Largest untruncated radius.
    pub fn clean_radius(&self) -> Option<u32> {
        self.usable(0).last().map(|&(r, _)| r)
    }

    /// Fills the fitted fields, leaving them empty when data is short.
    pub fn with_fit(mut self, r_min: u32) -> Self {
        if let Ok(f) = fit_growth(&self, r_min) {
            self.fitted_exponent = Some(f.exponent);
            self.fit_residual = Some(f.residual);
        }
        if let Ok(s) = subexp_stat(&self) {
            self.subexp_stat = Some(s.ratio);
        }
        self
    }
}

/// Least-squares slope of `log count` against `log r` over untruncated radii
/// `r ≥ r_min`.
pub fn fit_growth(report: &GrowthReport, r_min: u32) -> Result<GrowthFit> {
    let pts = report.usable(r_min);
    if pts.len() < 4 {
        return Err(Error::Data(format!(
            "{} untruncated radii ≥ {r_min}, need 4",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|&(r, _)| (r as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let (slope, _, residual) = ols(&xs, &ys);
    Ok(GrowthFit {
        exponent: slope,
        residual,
        points: pts.len(),
    })
}

/// Subexponentiality statistics over the untruncated radii.
pub fn subexp_stat(report: &GrowthReport) -> Result<SubexpStat> {
    let pts = report.usable(1);
    if pts.len() < 4 {
        return Err(Error::Data(format!("{} untruncated radii, need 4", pts.len())));
    }
    let &(rmax, cmax) = pts.last().expect("nonempty");
    let tail = &pts[pts.len() / 2..];
    let xs: Vec<f64> = tail.iter().map(|&(r, _)| r as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let (slope, _, _) = ols(&xs, &ys);
    Ok(SubexpStat {
        ratio: (cmax as f64).ln() / rmax as f64,
        tail_slope: slope,
        consistent: slope < SUBEXP_SLOPE,
    })
}

/// Breadth-first ball growth with reusable scratch space.
pub struct BallGrowth {
    seen: Vec<u32>,
    epoch: u32,
}

impl BallGrowth {
    pub fn new(n: usize) -> Self {
        BallGrowth {
            seen: vec![0; n],
            epoch: 0,
        }
    }

    /// Growth about `center` inside the set of points with `member(p)`,
    /// using only edges between members. Stops after `r_max`, after the
    /// first truncated radius, or when the ball stops growing.
    pub fn run(
        &mut self,
        space: &SpaceGraph,
        center: usize,
        member: impl Fn(usize) -> bool,
        r_max: Option<u32>,
    ) -> GrowthReport {
        if self.seen.len() < space.len() {
            self.seen.resize(space.len(), 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let e = self.epoch;
        let thr = space.edge_threshold;
        self.seen[center] = e;
        let mut frontier = vec![center];
        let mut counts = vec![1u64];
        let mut cut = space.margin(center) < thr;
        let mut truncated = vec![cut];
        let mut total = 1u64;
        while !cut && r_max.is_none_or(|m| (counts.len() as u32) <= m) {
            let mut next = Vec::new();
            for &u in &frontier {
                space.for_each_neighbor(u, |v| {
                    if self.seen[v] != e && member(v) {
                        self.seen[v] = e;
                        next.push(v);
                    }
                });
            }
            if next.is_empty() {
                break;
            }
            cut = next.iter().any(|&v| space.margin(v) < thr);
            total += next.len() as u64;
            counts.push(total);
            truncated.push(cut);
            frontier = next;
        }
        GrowthReport::from_counts(center, counts, truncated)
    }
}

/// Growth of the whole window about `center`.
pub fn ball_growth(space: &SpaceGraph, center: usize, r_max: Option<u32>) -> GrowthReport {
    BallGrowth::new(space.len()).run(space, center, |_| true, r_max)
}

/// Growth of a piece in its own induced graph, about its deepest point.
pub fn piece_growth(space: &SpaceGraph, piece: &[u32], r_max: Option<u32>) -> Option<GrowthReport> {
    let mut g = BallGrowth::new(space.len());
    let mut member = vec![false; space.len()];
    piece_growth_with(space, piece, &mut g, &mut member, r_max)
}

/// [`piece_growth`] with caller-provided scratch; `member` must be all
/// false on entry and is restored on exit.
pub fn piece_growth_with(
    space: &SpaceGraph,
    piece: &[u32],
    g: &mut BallGrowth,
    member: &mut [bool],
    r_max: Option<u32>,
) -> Option<GrowthReport> {
    let center = deepest_point(space, piece)?;
    for &x in piece {
        member[x as usize] = true;
    }
    let rep = g.run(space, center, |v| member[v], r_max);
    for &x in piece {
        member[x as usize] = false;
    }
    Some(rep)
}

/// Point of `set` farthest from the window boundary, ties broken towards
/// the basepoint and then by index.
pub fn deepest_point(space: &SpaceGraph, set: &[u32]) -> Option<usize> {
    let b = space.basepoint();
    set.iter().map(|&x| x as usize).min_by(|&p, &q| {
        space
            .margin(q)
            .total_cmp(&space.margin(p))
            .then(space.dist(b, p).total_cmp(&space.dist(b, q)))
            .then(p.cmp(&q))
    })
}

/// Point of `set` closest in the model metric to the window basepoint.
pub fn nearest_to_basepoint(space: &SpaceGraph, set: &[u32]) -> Option<usize> {
    let b = space.basepoint();
    set.iter()
        .map(|&x| x as usize)
        .min_by(|&p, &q| space.dist(b, p).total_cmp(&space.dist(b, q)).then(p.cmp(&q)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(counts: &[u64]) -> GrowthReport {
        GrowthReport::from_counts(0, counts.to_vec(), vec![false; counts.len()])
    }

    #[test]
    fn line_and_plane() {
        let line: Vec<u64> = (0..30).map(|n| 2 * n + 1).collect();
        let f = fit_growth(&report(&line), 5).unwrap();
        assert!((f.exponent - 1.0).abs() < 0.05, "{f:?}");
        let plane: Vec<u64> = (0..30).map(|n| 2 * n * n + 2 * n + 1).collect();
        let f = fit_growth(&report(&plane), 5).unwrap();
        assert!((f.exponent - 2.0).abs() < 0.1, "{f:?}");
    }

    #[test]
    fn tree_counts_diverge() {
        let counts = |rmax: u32| -> Vec<u64> { (0..=rmax).map(|n| 3 * (1u64 << n) - 2).collect() };
        let a = fit_growth(&report(&counts(10)), 1).unwrap().exponent;
        let b = fit_growth(&report(&counts(30)), 1).unwrap().exponent;
        assert!(b > a + 2.0);
        let s = subexp_stat(&report(&counts(30))).unwrap();
        assert!(!s.consistent);
        assert!((s.tail_slope - std::f64::consts::LN_2).abs() < 0.01);
    }

    #[test]
    fn short_data_is_an_error() {
        let mut r = report(&[1, 3, 5, 7, 9, 11]);
        r.truncated[3] = true;
        r.truncated[4] = true;
        r.truncated[5] = true;
        assert!(matches!(fit_growth(&r, 1), Err(Error::Data(_))));
    }

    #[test]
    fn constant_counts() {
        let s = subexp_stat(&report(&[1; 40])).unwrap();
        assert_eq!(s.ratio, 0.0);
        assert_eq!(s.tail_slope, 0.0);
    }
}
