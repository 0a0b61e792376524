use serde::{Deserialize, Serialize};

use super::Membership;
use crate::spaces::SpaceGraph;

/// The sets `N⁰_s ⊆ N¹_s ⊆ … ⊆ N^m_s` grown from one piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodChain {
    pub base: usize,
    pub s: f64,
    pub levels: Vec<Vec<u32>>,
    /// Pieces whose union forms each level above zero.
    pub level_pieces: Vec<Vec<u32>>,
    pub truncated: bool,
}

/// Iterated neighbourhoods of piece `base`: level `k + 1` is the union of all
/// pieces meeting the closed model `s`-neighbourhood of level `k`.
pub fn iterated_neighborhood(
    space: &SpaceGraph,
    pieces: &[Vec<u32>],
    base: usize,
    s: f64,
    m: usize,
) -> NeighborhoodChain {
    let n = space.len();
    let mem = Membership::new(n, pieces);
    let mut in_level = vec![false; n];
    let mut taken = vec![false; pieces.len()];
    let mut level: Vec<u32> = pieces[base].clone();
    for &x in &level {
        in_level[x as usize] = true;
    }
    let mut levels = vec![level.clone()];
    let mut level_pieces = vec![vec![base as u32]];
    // Points whose s-neighbourhood has not been scanned yet.
    let mut fresh = level.clone();
    let mut chosen: Vec<u32> = Vec::new();
    for _ in 0..m {
        let mut added_pieces = Vec::new();
        for &x in &fresh {
            space.for_each_within(x as usize, s, |y| {
                for &p in mem.of(y) {
                    if !taken[p as usize] {
                        taken[p as usize] = true;
                        added_pieces.push(p);
                    }
                }
            });
        }
        fresh.clear();
        for &p in &added_pieces {
            for &x in &pieces[p as usize] {
                if !in_level[x as usize] {
                    in_level[x as usize] = true;
                    fresh.push(x);
                    level.push(x);
                }
            }
        }
        chosen.extend(added_pieces);
        chosen.sort_unstable();
        level.sort_unstable();
        levels.push(level.clone());
        level_pieces.push(chosen.clone());
    }
    let thr = space.edge_threshold;
    let truncated = levels
        .last()
        .is_some_and(|l| l.iter().any(|&x| space.margin(x as usize) < thr));
    NeighborhoodChain {
        base,
        s,
        levels,
        level_pieces,
        truncated,
    }
}
