//! Combs `C_d`: trees built by repeatedly attaching half-line hairs.
//!
//! `C_1` is the line ℤ. `C_2` attaches a half-line at every vertex of the
//! line. `C_d` attaches a half-line at every non-root vertex of every hair
//! added at stage `d − 1`. A vertex is addressed by its base position and
//! the positions `o_2, …, o_l ≥ 1` along successive hairs.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CombAddr {
    pub base: i64,
    pub offsets: Vec<u32>,
}

impl CombAddr {
    pub fn level(&self) -> usize {
        self.offsets.len()
    }

    /// A hair root is a vertex where a hair of the next level starts.
    pub fn is_hair_root(&self, d: u32) -> bool {
        self.offsets.len() as u32 + 2 <= d
    }
}

/// Path distance between two comb vertices.
///
/// Addresses are padded with zeros (a vertex is the root of the deeper hairs
/// attached at it). At the first differing coordinate both points sit on the
/// same line, so the distance is the gap there plus the remaining tails.
pub fn comb_distance(a: &CombAddr, b: &CombAddr) -> u64 {
    let n = a.offsets.len().max(b.offsets.len());
    let get = |c: &CombAddr, i: usize| -> i64 {
        if i == 0 {
            c.base
        } else {
            c.offsets.get(i - 1).map_or(0, |&o| o as i64)
        }
    };
    let mut i = 0;
    while i <= n && get(a, i) == get(b, i) {
        i += 1;
    }
    if i > n {
        return 0;
    }
    let mut d = (get(a, i) - get(b, i)).unsigned_abs();
    for j in i + 1..=n {
        d += get(a, j) as u64 + get(b, j) as u64;
    }
    d
}

/// Vertices of `C_d` truncated at `extent`, in depth-first address order.
pub fn comb_vertices(d: u32, extent: u32) -> Vec<CombAddr> {
    fn grow(addr: &mut CombAddr, d: u32, extent: u32, out: &mut Vec<CombAddr>) {
        out.push(addr.clone());
        // Offsets are ≥ 1, so every hair vertex here is a non-root vertex.
        if addr.is_hair_root(d) {
            for o in 1..=extent {
                addr.offsets.push(o);
                grow(addr, d, extent, out);
                addr.offsets.pop();
            }
        }
    }
    let mut out = Vec::new();
    for b in -(extent as i64)..=extent as i64 {
        let mut a = CombAddr {
            base: b,
            offsets: Vec::new(),
        };
        grow(&mut a, d, extent, &mut out);
    }
    out
}

/// Number of vertices of the truncated comb.
pub fn comb_size(d: u32, extent: u32) -> u128 {
    let e = extent as u128;
    // Each hair vertex at level l (< d) carries a full sub-comb below it.
    let mut per_hair_vertex: u128 = 1;
    for _ in 2..d {
        per_hair_vertex = 1 + e * per_hair_vertex;
    }
    let per_base = if d >= 2 { 1 + e * per_hair_vertex } else { 1 };
    (2 * e + 1) * per_base
}

/// Neighbours of a comb vertex inside the truncated comb.
pub fn comb_neighbors(a: &CombAddr, d: u32, extent: u32) -> Vec<CombAddr> {
    let e = extent;
    let mut out = Vec::new();
    match a.offsets.last().copied() {
        None => {
            if a.base > -(e as i64) {
                out.push(CombAddr {
                    base: a.base - 1,
                    offsets: vec![],
                });
            }
            if a.base < e as i64 {
                out.push(CombAddr {
                    base: a.base + 1,
                    offsets: vec![],
                });
            }
        }
        Some(o) => {
            let mut p = a.clone();
            if o == 1 {
                p.offsets.pop();
            } else {
                *p.offsets.last_mut().unwrap() = o - 1;
            }
            out.push(p);
            if o < e {
                let mut q = a.clone();
                *q.offsets.last_mut().unwrap() = o + 1;
                out.push(q);
            }
        }
    }
    if a.is_hair_root(d) {
        let mut c = a.clone();
        c.offsets.push(1);
        out.push(c);
    }
    out
}

/// True for vertices whose line was cut by the truncation.
pub fn is_truncated_end(a: &CombAddr, extent: u32) -> bool {
    match a.offsets.last() {
        None => a.base.unsigned_abs() == extent as u64,
        Some(&o) => o == extent,
    }
}
