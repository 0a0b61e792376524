use serde::{Deserialize, Serialize};

use super::ols;
use crate::spaces::{Points, SpaceGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublinearityReport {
    pub basepoint: usize,
    pub m_grid: Vec<u64>,
    /// Largest diameter among pieces within distance `m` of the basepoint.
    pub max_diam: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Least-squares slope of `ratio` against `m`.
    pub trend: f64,
    /// Some counted piece reaches the window boundary.
    pub truncated: Vec<bool>,
    /// The ratio decreases across the upper half of the grid.
    pub consistent: bool,
}

/// Model diameter of a set of points.
pub fn diameter(space: &SpaceGraph, piece: &[u32]) -> f64 {
    if let Points::Integer(v) = &space.points {
        let (lo, hi) = piece.iter().fold((i64::MAX, i64::MIN), |(lo, hi), &x| {
            (lo.min(v[x as usize]), hi.max(v[x as usize]))
        });
        return if piece.is_empty() { 0.0 } else { (hi - lo) as f64 };
    }
    let mut best: f64 = 0.0;
    for (i, &a) in piece.iter().enumerate() {
        for &b in &piece[i + 1..] {
            best = best.max(space.dist(a as usize, b as usize));
        }
    }
    best
}

/// Radial sublinearity statistics of a family of pieces about `basepoint`.
pub fn radial_sublinearity(
    space: &SpaceGraph,
    pieces: &[Vec<u32>],
    basepoint: usize,
    m_grid: &[u64],
) -> SublinearityReport {
    let thr = space.edge_threshold;
    let stats: Vec<(f64, f64, bool)> = pieces
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| {
            let near = p
                .iter()
                .map(|&x| space.dist(basepoint, x as usize))
                .fold(f64::INFINITY, f64::min);
            let clipped = p.iter().any(|&x| space.margin(x as usize) < thr);
            (near, diameter(space, p), clipped)
        })
        .collect();
    let mut max_diam = Vec::with_capacity(m_grid.len());
    let mut truncated = Vec::with_capacity(m_grid.len());
    for &m in m_grid {
        let mut d: f64 = 0.0;
        let mut t = false;
        for &(near, diam, clipped) in &stats {
            if near <= m as f64 {
                d = d.max(diam);
                t |= clipped;
            }
        }
        max_diam.push(d);
        truncated.push(t);
    }
    let ratio: Vec<f64> = m_grid
        .iter()
        .zip(&max_diam)
        .map(|(&m, &d)| if m == 0 { f64::INFINITY } else { d / m as f64 })
        .collect();
    let xs: Vec<f64> = m_grid.iter().filter(|&&m| m > 0).map(|&m| m as f64).collect();
    let ys: Vec<f64> = ratio.iter().copied().filter(|r| r.is_finite()).collect();
    let trend = if xs.len() >= 2 { ols(&xs, &ys).0 } else { 0.0 };
    let top = &ratio[ratio.len() / 2..];
    let consistent = top.len() >= 2
        && top.windows(2).all(|w| w[1] <= w[0])
        && top[top.len() - 1] < top[0];
    SublinearityReport {
        basepoint,
        m_grid: m_grid.to_vec(),
        max_diam,
        ratio,
        trend,
        truncated,
        consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{generate_net, Model, Window};

    fn line(lo: i64, hi: i64) -> SpaceGraph {
        generate_net(Model::Z, &Window::Interval { lo, hi }, 1.0, 1.0).unwrap()
    }

    #[test]
    fn bounded_cover_ratio_is_exact() {
        let s = line(-300, 300);
        let pieces: Vec<Vec<u32>> = (0..s.len() as u32).collect::<Vec<_>>().chunks(5).map(|c| c.to_vec()).collect();
        let grid: Vec<u64> = (1..=8).map(|k| 10 * k).collect();
        let b = s.basepoint();
        let rep = radial_sublinearity(&s, &pieces, b, &grid);
        for (k, &m) in grid.iter().enumerate() {
            assert!(rep.ratio[k] <= 4.0 / m as f64);
        }
        assert!(rep.consistent);
    }

    #[test]
    fn dyadic_blocks_are_not_sublinear() {
        let s = line(0, 4095);
        let mut pieces = vec![vec![0u32]];
        for k in 0..12 {
            pieces.push(((1u32 << k)..(2u32 << k)).collect());
        }
        let grid: Vec<u64> = (2..12).map(|k| 1u64 << k).collect();
        let rep = radial_sublinearity(&s, &pieces, 0, &grid);
        assert!(!rep.consistent);
        assert!(rep.ratio.iter().all(|&r| r >= 0.45));
    }
}
