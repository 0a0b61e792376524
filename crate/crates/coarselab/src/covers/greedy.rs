use super::disjoint::{r_multiplicity, Metric};
use super::{ColoredDecomposition, Cover};
use crate::error::{Error, Result};
use crate::spaces::SpaceGraph;

struct Piece {
    colour: u32,
    origin: usize,
    points: Vec<u32>,
}

/// Extracts an `(R, n)` decomposition from a cover of `2R`-multiplicity at
/// most `n + 1`.
///
/// Colours `0..=n` first receive maximal `R`-separated collections of whole
/// cover pieces, taken in index order. Each point still uncovered after that
/// (in index order) clips its first containing piece `V` to `V ∩ B(x, R)` and
/// files the clip under a colour whose other pieces avoid `B(x, 2R)`, merging
/// it with earlier clips of `V` in that colour. All balls use the model
/// metric.
pub fn greedy_decomposition(space: &SpaceGraph, cover: &Cover, r: f64, n: u32) -> Result<ColoredDecomposition> {
    cover.validate(space)?;
    let mult = r_multiplicity(space, cover, 2.0 * r, Metric::Model);
    if mult.value > n as usize + 1 {
        return Err(Error::precondition(
            format!(
                "cover has {}-multiplicity {} > {}",
                2.0 * r,
                mult.value,
                n + 1
            ),
            space.within(mult.center, 2.0 * r),
        ));
    }
    let npts = space.len();
    let colours = n as usize + 1;
    let mem = cover.membership(space);
    // near[c][x]: x lies within distance < R of a colour-c piece.
    let mut near = vec![vec![false; npts]; colours];
    let mut owner: Vec<Vec<Option<usize>>> = vec![vec![None; npts]; colours];
    let mut pieces: Vec<Piece> = Vec::new();
    let mut chosen = vec![false; cover.len()];
    let mut covered = vec![false; npts];

    let mark = |near: &mut Vec<bool>, pts: &[u32]| {
        for &x in pts {
            space.for_each_within(x as usize, r, |y| {
                if y == x as usize || space.dist(x as usize, y) < r - 1e-9 {
                    near[y] = true;
                }
            });
        }
    };

    for c in 0..colours {
        for (v, pts) in cover.pieces.iter().enumerate() {
            if chosen[v] || pts.iter().any(|&x| near[c][x as usize]) {
                continue;
            }
            chosen[v] = true;
            mark(&mut near[c], pts);
            let id = pieces.len();
            for &x in pts {
                covered[x as usize] = true;
                owner[c][x as usize] = Some(id);
            }
            pieces.push(Piece {
                colour: c as u32,
                origin: v,
                points: pts.clone(),
            });
        }
    }

    for x in 0..npts {
        if covered[x] {
            continue;
        }
        let v = mem.of(x)[0] as usize;
        let big = space.within(x, 2.0 * r);
        let admissible = |c: usize| {
            big.iter().all(|&y| match owner[c][y] {
                None => true,
                Some(p) => pieces[p].origin == v,
            })
        };
        let existing = |c: usize| {
            pieces
                .iter()
                .position(|p| p.colour as usize == c && p.origin == v)
        };
        let pick = (0..colours)
            .filter(|&c| existing(c).is_some())
            .find(|&c| admissible(c))
            .or_else(|| (0..colours).find(|&c| admissible(c)));
        let Some(c) = pick else {
            return Err(Error::precondition(
                format!("no admissible colour for the clip of piece {v} at point {x}"),
                big,
            ));
        };
        let cover_v = &cover.pieces[v];
        let clip: Vec<u32> = space
            .within(x, r)
            .into_iter()
            .filter(|y| cover_v.binary_search(&(*y as u32)).is_ok())
            .map(|y| y as u32)
            .collect();
        let id = match existing(c) {
            Some(id) => id,
            None => {
                pieces.push(Piece {
                    colour: c as u32,
                    origin: v,
                    points: Vec::new(),
                });
                pieces.len() - 1
            }
        };
        let fresh: Vec<u32> = clip
            .into_iter()
            .filter(|&y| owner[c][y as usize] != Some(id))
            .collect();
        for &y in &fresh {
            covered[y as usize] = true;
            owner[c][y as usize] = Some(id);
        }
        pieces[id].points.extend(fresh);
    }

    let mut dec = ColoredDecomposition::new(
        pieces.iter().map(|p| p.points.clone()).collect(),
        pieces.iter().map(|p| p.colour).collect(),
        r,
    );
    dec.d = n;
    dec.origin = pieces.iter().map(|p| p.origin).collect();
    Ok(dec)
}
