//! A 3-regular walk `ℤ → T₃` with logarithmic distortion.
//!
//! The target is the subtree of T₃ made of a spine `{s_k : k ∈ ℤ}` with a
//! rooted binary tree `B_|k|` of depth `|k|` hanging from each `s_k` at its
//! root `k′`. The walk starts at `W(0) = 0′` and for `k = 1, 2, …` goes
//! `s_{k−1} → s_k → k′`, runs the closed depth-first walk around `B_k`
//! (visiting the leaves in lexicographic order, length `4(2ᵏ − 1)`), then
//! returns to `s_k`. Negative integers do the same on the `k < 0` side.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{MapRecord, Provenance};
use crate::error::{Error, Result};
use crate::spaces::tree::Word;
use crate::spaces::{generate_net, subtree_space, Model, Window};

/// Address of a vertex of the walk's target tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WalkVertex {
    Spine(i64),
    /// Node of `B_|k|`; `path` lists the child choices (0 or 1) from `k′`.
    Tree { k: i64, path: Vec<u8> },
}

impl WalkVertex {
    pub fn root(k: i64) -> Self {
        WalkVertex::Tree { k, path: Vec::new() }
    }
}

/// Tree distance computed from addresses alone.
pub fn address_distance(a: &WalkVertex, b: &WalkVertex) -> u64 {
    use WalkVertex::*;
    match (a, b) {
        (Spine(x), Spine(y)) => x.abs_diff(*y),
        (Spine(x), Tree { k, path }) | (Tree { k, path }, Spine(x)) => x.abs_diff(*k) + 1 + path.len() as u64,
        (Tree { k: k1, path: p }, Tree { k: k2, path: q }) => {
            if k1 == k2 {
                let l = p.iter().zip(q).take_while(|(a, b)| a == b).count();
                (p.len() + q.len() - 2 * l) as u64
            } else {
                p.len() as u64 + q.len() as u64 + 2 + k1.abs_diff(*k2)
            }
        }
    }
}

/// Length of the closed depth-first walk around `B_k`.
pub fn closed_walk_length(k: u32) -> u64 {
    4 * ((1u64 << k) - 1)
}

/// Number of steps the walk takes on one side to finish the tour of `B_K`
/// and stand at `K′`.
pub fn side_length(k_max: u32) -> u64 {
    if k_max == 0 {
        return 0;
    }
    // 0′ → s₀ → s₁ → 1′, then per k: tour, k′ → s_k → s_{k+1} → (k+1)′.
    let mut len = 3;
    for k in 1..k_max {
        len += closed_walk_length(k) + 3;
    }
    len + closed_walk_length(k_max)
}

/// Smallest spine range whose walk covers `[−b, b]`.
pub fn spine_for(b: u64) -> u32 {
    let mut k = 1;
    while side_length(k) < b {
        k += 1;
    }
    k
}

fn free_letters(entered: u8) -> [u8; 2] {
    match entered {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// One side of the walk: `W(sign·1), …, W(sign·side_length(k_max))` with
/// their addresses and T₃ words.
fn walk_side(k_max: u32, sign: i64) -> Vec<(WalkVertex, Vec<u8>)> {
    let mut out = Vec::new();
    let mut word: Vec<u8> = vec![0];
    out.push((WalkVertex::Spine(0), word.clone()));
    let mut spine_letter = 0u8;
    for k in 1..=k_max as i64 {
        let step = if k == 1 {
            if sign > 0 {
                1
            } else {
                2
            }
        } else {
            free_letters(spine_letter)[1]
        };
        spine_letter = step;
        word.push(step);
        out.push((WalkVertex::Spine(sign * k), word.clone()));
        let root_letter = free_letters(spine_letter)[0];
        word.push(root_letter);
        out.push((WalkVertex::root(sign * k), word.clone()));
        let mut path = Vec::new();
        tour(sign * k, k as u32, root_letter, &mut word, &mut path, &mut out);
        if k < k_max as i64 {
            word.pop();
            out.push((WalkVertex::Spine(sign * k), word.clone()));
        }
    }
    out
}

fn tour(k: i64, depth: u32, entered: u8, word: &mut Vec<u8>, path: &mut Vec<u8>, out: &mut Vec<(WalkVertex, Vec<u8>)>) {
    if depth == 0 {
        return;
    }
    for (child, letter) in free_letters(entered).into_iter().enumerate() {
        word.push(letter);
        path.push(child as u8);
        out.push((WalkVertex::Tree { k, path: path.clone() }, word.clone()));
        tour(k, depth - 1, letter, word, path, out);
        word.pop();
        path.pop();
        out.push((WalkVertex::Tree { k, path: path.clone() }, word.clone()));
    }
}

/// The walk on an integer window together with target addresses.
#[derive(Clone, Debug)]
pub struct TreeWalk {
    pub map: MapRecord,
    /// Address of every target vertex, by target index.
    pub addresses: Vec<WalkVertex>,
    /// Spine range `K`: the trees `B_0, …, B_K` are toured.
    pub spine: u32,
    /// Half-width `b` of the source window `[−b, b]`.
    pub half_width: u64,
}

impl TreeWalk {
    /// Address of `W(n)`.
    pub fn image(&self, n: i64) -> &WalkVertex {
        &self.addresses[self.map.assignment[(n + self.half_width as i64) as usize]]
    }

    /// `d(W(0), W(n))` for every `n` in the window, by address arithmetic.
    pub fn anchored_distances(&self) -> Vec<u64> {
        let o = WalkVertex::root(0);
        let b = self.half_width as i64;
        (-b..=b).map(|n| address_distance(&o, self.image(n))).collect()
    }
}

/// The walk with spine range `n_max`; the source window is the whole tour,
/// `[−L, L]` with `L = side_length(n_max)`.
pub fn tree_walk(n_max: u32) -> Result<TreeWalk> {
    if n_max < 1 {
        return Err(Error::Parameter("walk spine range must be at least 1".into()));
    }
    build(n_max, side_length(n_max))
}

/// The walk restricted to the integer window `[−b, b]`.
pub fn tree_walk_window(b: u64) -> Result<TreeWalk> {
    if b < 1 {
        return Err(Error::Parameter("walk window must contain a nonzero integer".into()));
    }
    build(spine_for(b), b)
}

fn build(k_max: u32, b: u64) -> Result<TreeWalk> {
    if k_max > 40 {
        return Err(Error::SizeCap {
            what: "walk spine range".into(),
            size: k_max as u128,
            cap: 40,
        });
    }
    let pos = walk_side(k_max, 1);
    let neg = walk_side(k_max, -1);
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut words: Vec<Word> = Vec::new();
    let mut addresses = Vec::new();
    let mut intern = |addr: &WalkVertex, w: &Vec<u8>| -> usize {
        if let Some(&i) = index.get(w) {
            return i;
        }
        let i = words.len();
        index.insert(w.clone(), i);
        words.push(w.clone().into_boxed_slice());
        addresses.push(addr.clone());
        i
    };
    let b = b as usize;
    let origin = intern(&WalkVertex::root(0), &Vec::new());
    let mut assignment = vec![origin; 2 * b + 1];
    for (j, (a, w)) in pos.iter().take(b).enumerate() {
        assignment[b + 1 + j] = intern(a, w);
    }
    for (j, (a, w)) in neg.iter().take(b).enumerate() {
        assignment[b - 1 - j] = intern(a, w);
    }
    let source = generate_net(
        Model::Z,
        &Window::Interval {
            lo: -(b as i64),
            hi: b as i64,
        },
        1.0,
        1.0,
    )?;
    let mut target = subtree_space(words);
    target.name = "t3-walk".into();
    let prov = Provenance::new("walk").with("spine", k_max).with("half_width", b as u64);
    let map = MapRecord::new(Arc::new(source), Arc::new(target), assignment, prov)?;
    Ok(TreeWalk {
        map,
        addresses,
        spine: k_max,
        half_width: b as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::tree::{is_reduced, word_distance};

    #[test]
    fn tour_lengths() {
        assert_eq!(closed_walk_length(1), 4);
        assert_eq!(closed_walk_length(2), 12);
        let w = tree_walk(3).unwrap();
        // Between the arrival at k′ and the departure from k′.
        let b = w.half_width as i64;
        for k in 1..=3i64 {
            let times: Vec<i64> = (0..=b).filter(|&n| *w.image(n) == WalkVertex::root(k)).collect();
            let span = times.last().unwrap() - times.first().unwrap();
            assert_eq!(span as u64, closed_walk_length(k as u32));
        }
    }

    #[test]
    fn words_agree_with_addresses() {
        let w = tree_walk(5).unwrap();
        let Some(words) = (match &w.map.target.points {
            crate::spaces::Points::Tree(v) => Some(v),
            _ => None,
        }) else {
            panic!("tree target expected");
        };
        for i in (0..words.len()).step_by(7) {
            assert!(is_reduced(&words[i]));
            for j in (0..words.len()).step_by(11) {
                assert_eq!(
                    word_distance(&words[i], &words[j]) as u64,
                    address_distance(&w.addresses[i], &w.addresses[j])
                );
            }
        }
    }

    #[test]
    fn walk_is_symmetric() {
        let w = tree_walk_window(500).unwrap();
        let d = w.anchored_distances();
        let b = w.half_width as usize;
        for n in 0..=b {
            assert_eq!(d[b + n], d[b - n]);
        }
        assert_eq!(d[b], 0);
    }
}
