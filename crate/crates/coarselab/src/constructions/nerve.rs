//! The nerve of a cover and the barycentric map into it.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::covers::Cover;
use crate::error::Result;
use crate::spaces::SpaceGraph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NerveComplex {
    /// Piece ids.
    pub vertices: Vec<usize>,
    /// Distinct supports realized by points, each sorted.
    pub simplices: Vec<Vec<u32>>,
    /// Sparse barycentric coordinates `φ_U(x)` per point, sorted by piece.
    pub coordinates: Vec<Vec<(u32, f64)>>,
    pub dimension: usize,
}

/// Graph distance from every member of `piece` to the complement of the
/// piece in the window: one more than the distance, inside the piece, to
/// the members with a neighbour outside. `None` when the piece is the
/// whole window.
fn distance_to_complement(space: &SpaceGraph, piece: &[u32], member: &mut [bool]) -> Option<Vec<u32>> {
    for &x in piece {
        member[x as usize] = true;
    }
    let mut dist = vec![u32::MAX; piece.len()];
    let pos: std::collections::HashMap<u32, usize> = piece.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut q = VecDeque::new();
    for (i, &x) in piece.iter().enumerate() {
        let mut edge = false;
        space.for_each_neighbor(x as usize, |y| edge |= !member[y]);
        if edge {
            dist[i] = 1;
            q.push_back(i);
        }
    }
    while let Some(i) = q.pop_front() {
        let d = dist[i];
        space.for_each_neighbor(piece[i] as usize, |y| {
            if member[y] {
                let j = pos[&(y as u32)];
                if dist[j] == u32::MAX {
                    dist[j] = d + 1;
                    q.push_back(j);
                }
            }
        });
    }
    for &x in piece {
        member[x as usize] = false;
    }
    if dist.iter().all(|&d| d == u32::MAX) {
        return None;
    }
    Some(dist)
}

/// Barycentric map `φ_U(x) = d(x, X∖U) / Σ_V d(x, X∖V)` with graph
/// distances inside the window.
///
/// On a net every member of a piece is at graph distance at least 1 from
/// the complement, so the numerators of the pieces containing a point never
/// vanish together. Pieces equal to the whole window have infinite
/// numerator and share the weight equally.
pub fn nerve_map(space: &SpaceGraph, cover: &Cover) -> Result<NerveComplex> {
    cover.validate(space)?;
    let n = space.len();
    let mut member = vec![false; n];
    let mut finite: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut infinite: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (k, piece) in cover.pieces.iter().enumerate() {
        match distance_to_complement(space, piece, &mut member) {
            Some(dist) => {
                for (i, &x) in piece.iter().enumerate() {
                    finite[x as usize].push((k as u32, dist[i]));
                }
            }
            None => {
                for &x in piece {
                    infinite[x as usize].push(k as u32);
                }
            }
        }
    }
    let mut coordinates = Vec::with_capacity(n);
    let mut simplices = BTreeSet::new();
    let mut dimension = 0;
    for x in 0..n {
        let mut coord: Vec<(u32, f64)> = if !infinite[x].is_empty() {
            let w = 1.0 / infinite[x].len() as f64;
            infinite[x].iter().map(|&k| (k, w)).collect()
        } else {
            let total: f64 = finite[x].iter().map(|&(_, d)| d as f64).sum();
            finite[x].iter().map(|&(k, d)| (k, d as f64 / total)).collect()
        };
        coord.sort_by_key(|&(k, _)| k);
        let support: Vec<u32> = finite[x]
            .iter()
            .map(|&(k, _)| k)
            .chain(infinite[x].iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        dimension = dimension.max(support.len().saturating_sub(1));
        simplices.insert(support);
        coordinates.push(coord);
    }
    Ok(NerveComplex {
        vertices: (0..cover.len()).collect(),
        simplices: simplices.into_iter().collect(),
        coordinates,
        dimension,
    })
}

impl NerveComplex {
    /// Largest ℓ² distance between the coordinate vectors of adjacent points.
    pub fn lipschitz(&self, space: &SpaceGraph) -> f64 {
        let mut best: f64 = 0.0;
        for u in 0..space.len() {
            space.for_each_neighbor(u, |v| {
                if u < v {
                    best = best.max(l2_distance(&self.coordinates[u], &self.coordinates[v]));
                }
            });
        }
        best
    }

    /// Checks nonnegativity, unit sums and that supports equal memberships.
    pub fn check(&self, space: &SpaceGraph, cover: &Cover) -> Vec<usize> {
        let m = cover.membership(space);
        (0..space.len())
            .filter(|&x| {
                let c = &self.coordinates[x];
                let sum: f64 = c.iter().map(|&(_, w)| w).sum();
                let support: Vec<u32> = c.iter().filter(|&&(_, w)| w > 0.0).map(|&(k, _)| k).collect();
                c.iter().any(|&(_, w)| w < 0.0) || (sum - 1.0).abs() > 1e-9 || support != m.of(x)
            })
            .collect()
    }
}

fn l2_distance(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ka, wa)), Some(&(kb, wb))) if ka == kb => {
                s += (wa - wb).powi(2);
                i += 1;
                j += 1;
            }
            (Some(&(ka, wa)), Some(&(kb, _))) if ka < kb => {
                s += wa * wa;
                i += 1;
            }
            (Some(&(_, wa)), None) => {
                s += wa * wa;
                i += 1;
            }
            (_, Some(&(_, wb))) => {
                s += wb * wb;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{generate_net, Model, Window};

    fn line(n: i64) -> SpaceGraph {
        generate_net(Model::Z, &Window::Interval { lo: 0, hi: n }, 1.0, 1.0).unwrap()
    }

    #[test]
    fn deep_point_has_unit_coordinate() {
        let s = line(20);
        let cover = Cover::new(vec![(0..12).collect(), (10..21).collect()]);
        let nerve = nerve_map(&s, &cover).unwrap();
        assert_eq!(nerve.coordinates[3], vec![(0, 1.0)]);
        assert_eq!(nerve.dimension, 1);
        assert!(nerve.check(&s, &cover).is_empty());
    }

    #[test]
    fn symmetric_point_splits_evenly() {
        let s = line(20);
        let cover = Cover::new(vec![(0..12).collect(), (9..21).collect()]);
        let nerve = nerve_map(&s, &cover).unwrap();
        // 10 and 11 are both at distance 2 and 3 from the two complements.
        let c = &nerve.coordinates[10];
        assert_eq!(c.len(), 2);
        assert!((c[0].1 - c[1].1).abs() < 0.5);
        let mid = Cover::new(vec![(0..11).collect(), (10..21).collect()]);
        let n2 = nerve_map(&s, &mid).unwrap();
        assert_eq!(n2.coordinates[10], vec![(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn whole_space_piece() {
        let s = line(5);
        let cover = Cover::whole(&s);
        let nerve = nerve_map(&s, &cover).unwrap();
        assert!(nerve.coordinates.iter().all(|c| c == &vec![(0, 1.0)]));
        assert_eq!(nerve.lipschitz(&s), 0.0);
    }
}
