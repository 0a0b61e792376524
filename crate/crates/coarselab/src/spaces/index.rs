//! Spatial index for point sets in the upper half-space.
//!
//! Points are bucketed by layer `k = floor(ln y / h)` and by horizontal cells
//! whose width `c·e^{k h}` scales with the layer height, so that every cell
//! has roughly constant hyperbolic size.

use std::collections::HashMap;

use crate::hyperbolic::hd_cosh_minus_one;

type Key = (i32, i64, i64);

#[derive(Clone, Debug)]
pub struct LayerIndex {
    dim: usize,
    h: f64,
    cell: f64,
    cells: HashMap<Key, (u32, u32)>,
    order: Vec<u32>,
}

/// Incrementally built index used during net generation.
#[derive(Default)]
pub(crate) struct DynamicIndex {
    pub(crate) cells: HashMap<Key, Vec<u32>>,
}

fn key_of(dim: usize, h: f64, cell: f64, p: &[f64]) -> Key {
    let y = p[dim - 1];
    let k = (y.ln() / h).floor() as i32;
    let w = cell * (k as f64 * h).exp();
    let i = (p[0] / w).floor() as i64;
    let j = if dim >= 3 { (p[1] / w).floor() as i64 } else { 0 };
    (k, i, j)
}

/// Enumerates the keys of all cells that may hold a point within hyperbolic
/// distance `rho` of `p`.
fn candidate_keys(dim: usize, h: f64, cell: f64, p: &[f64], rho: f64, mut f: impl FnMut(Key)) {
    let y = p[dim - 1];
    let ly = y.ln();
    let k0 = ((ly - rho) / h).floor() as i32;
    let k1 = ((ly + rho) / h).floor() as i32;
    // The ball is the Euclidean ball with centre height y·cosh ρ and radius
    // y·sinh ρ; each layer only needs its widest horizontal cross-section.
    let cy = y * rho.cosh();
    let er = y * rho.sinh() * (1.0 + 1e-12);
    for k in k0..=k1 {
        let lo = (k as f64 * h).exp();
        let hi = ((k + 1) as f64 * h).exp();
        let gap = if cy < lo {
            lo - cy
        } else if cy > hi {
            cy - hi
        } else {
            0.0
        };
        if gap > er {
            continue;
        }
        let reach = (er * er - gap * gap).sqrt();
        let w = cell * lo;
        let i0 = ((p[0] - reach) / w).floor() as i64;
        let i1 = ((p[0] + reach) / w).floor() as i64;
        let (j0, j1) = if dim >= 3 {
            (
                ((p[1] - reach) / w).floor() as i64,
                ((p[1] + reach) / w).floor() as i64,
            )
        } else {
            (0, 0)
        };
        for i in i0..=i1 {
            for j in j0..=j1 {
                f((k, i, j));
            }
        }
    }
}

impl DynamicIndex {
    pub(crate) fn insert(&mut self, dim: usize, h: f64, cell: f64, p: &[f64], id: u32) {
        self.cells
            .entry(key_of(dim, h, cell, p))
            .or_default()
            .push(id);
    }

    /// True when some stored point lies at distance `< rho` from `p`.
    pub(crate) fn any_closer(
        &self,
        dim: usize,
        h: f64,
        cell: f64,
        coords: &[f64],
        p: &[f64],
        rho: f64,
    ) -> bool {
        let lim = rho.cosh() - 1.0;
        let mut hit = false;
        candidate_keys(dim, h, cell, p, rho, |key| {
            if hit {
                return;
            }
            if let Some(ids) = self.cells.get(&key) {
                for &id in ids {
                    let q = &coords[id as usize * dim..(id as usize + 1) * dim];
                    if hd_cosh_minus_one(p, q) < lim {
                        hit = true;
                        return;
                    }
                }
            }
        });
        hit
    }
}

impl LayerIndex {
    /// Builds an index over `coords` (row-major, `dim` values per point).
    pub fn build(dim: usize, h: f64, cell: f64, coords: &[f64]) -> Self {
        let n = coords.len() / dim;
        let mut keyed: Vec<(Key, u32)> = (0..n)
            .map(|i| (key_of(dim, h, cell, &coords[i * dim..(i + 1) * dim]), i as u32))
            .collect();
        keyed.sort_unstable();
        let mut cells = HashMap::new();
        let mut order = Vec::with_capacity(n);
        let mut start = 0usize;
        while start < keyed.len() {
            let key = keyed[start].0;
            let mut end = start;
            while end < keyed.len() && keyed[end].0 == key {
                order.push(keyed[end].1);
                end += 1;
            }
            cells.insert(key, (start as u32, end as u32));
            start = end;
        }
        LayerIndex {
            dim,
            h,
            cell,
            cells,
            order,
        }
    }

    /// Calls `f` on every indexed point within closed distance `rho` of `p`.
    pub fn for_each_within(&self, coords: &[f64], p: &[f64], rho: f64, mut f: impl FnMut(usize)) {
        let dim = self.dim;
        let lim = rho.cosh() - 1.0;
        let slack = 1e-12 * (1.0 + lim);
        candidate_keys(dim, self.h, self.cell, p, rho, |key| {
            if let Some(&(s, e)) = self.cells.get(&key) {
                for &id in &self.order[s as usize..e as usize] {
                    let id = id as usize;
                    let q = &coords[id * dim..(id + 1) * dim];
                    if hd_cosh_minus_one(p, q) <= lim + slack {
                        f(id);
                    }
                }
            }
        });
    }

    /// Nearest indexed point to `p`, searching out to distance `max_rho`.
    pub fn nearest(&self, coords: &[f64], p: &[f64], max_rho: f64) -> Option<(usize, f64)> {
        let mut rho = (self.h * 2.0).min(max_rho);
        loop {
            let mut best: Option<(usize, f64)> = None;
            self.for_each_within(coords, p, rho, |id| {
                let q = &coords[id * self.dim..(id + 1) * self.dim];
                let c = hd_cosh_minus_one(p, q);
                if best.is_none_or(|(bi, bc)| c < bc || (c == bc && id < bi)) {
                    best = Some((id, c));
                }
            });
            if let Some((id, c)) = best {
                return Some((id, (c + 1.0).acosh()));
            }
            if rho >= max_rho {
                return None;
            }
            rho = (rho * 2.0).min(max_rho);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::hd_distance;

    #[test]
    fn range_query_matches_scan() {
        let mut coords = Vec::new();
        let mut s = 12345u64;
        for _ in 0..400 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = ((s >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 8.0;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let y = ((s >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0).exp();
            coords.extend([x, y]);
        }
        let idx = LayerIndex::build(2, 0.5, 0.5, &coords);
        for c in 0..40 {
            let p = &coords[c * 2..c * 2 + 2];
            for rho in [0.3, 1.0, 2.5] {
                let mut got = Vec::new();
                idx.for_each_within(&coords, p, rho, |i| got.push(i));
                got.sort();
                let want: Vec<usize> = (0..400)
                    .filter(|&i| hd_distance(p, &coords[i * 2..i * 2 + 2]) <= rho)
                    .collect();
                assert_eq!(got, want);
            }
        }
    }
}
