use serde::{Deserialize, Serialize};

use super::growth::{deepest_point, fit_growth, nearest_to_basepoint, BallGrowth, GrowthReport};
use crate::covers::{iterated_neighborhood, ColoredDecomposition};
use crate::error::{Error, Result};
use crate::spaces::SpaceGraph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscalationLevel {
    pub m: usize,
    pub points: usize,
    pub pieces: usize,
    pub exponent: f64,
    pub residual: f64,
    pub fit_points: usize,
    /// Largest radius with no truncation.
    pub clean_radius: u32,
    pub growth: GrowthReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscalationReport {
    pub base: usize,
    pub s: f64,
    pub r_min: u32,
    /// Growth is measured about this point at every level.
    pub center: usize,
    pub levels: Vec<EscalationLevel>,
}

impl EscalationReport {
    pub fn exponents(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.exponent).collect()
    }

    pub fn non_decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].exponent >= w[0].exponent)
    }
}

/// Piece whose point nearest the basepoint is nearest, among `candidates`.
pub fn central_piece(space: &SpaceGraph, pieces: &[Vec<u32>], candidates: impl IntoIterator<Item = usize>) -> Option<usize> {
    let b = space.basepoint();
    candidates
        .into_iter()
        .filter(|&k| !pieces[k].is_empty())
        .map(|k| {
            let p = nearest_to_basepoint(space, &pieces[k]).expect("nonempty");
            (space.dist(b, p), k)
        })
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .map(|(_, k)| k)
}

/// Growth exponents of `N^m_s(base)` for `m = 0..=m_max`, each fitted over
/// untruncated radii `≥ r_min` of the induced graph, measured from one
/// fixed point of the base piece.
pub fn escalation(
    space: &SpaceGraph,
    decomp: &ColoredDecomposition,
    base: usize,
    s: f64,
    m_max: usize,
    r_min: u32,
) -> Result<EscalationReport> {
    if base >= decomp.len() {
        return Err(Error::Index {
            index: base,
            len: decomp.len(),
        });
    }
    if s < 1.0 {
        return Err(Error::Parameter(format!("escalation needs s ≥ 1, got {s}")));
    }
    let chain = iterated_neighborhood(space, &decomp.pieces, base, s, m_max);
    let center = deepest_point(space, &decomp.pieces[base])
        .ok_or_else(|| Error::EmptySpace(format!("piece {base}")))?;
    let mut g = BallGrowth::new(space.len());
    let mut member = vec![false; space.len()];
    let mut levels = Vec::with_capacity(chain.levels.len());
    for (m, level) in chain.levels.iter().enumerate() {
        for &x in level {
            member[x as usize] = true;
        }
        let growth = g.run(space, center, |v| member[v], None);
        for &x in level {
            member[x as usize] = false;
        }
        let fit = fit_growth(&growth, r_min).map_err(|e| {
            Error::Truncation(format!(
                "level {m}: {e}; clean radius {:?}, reduce m or enlarge the window",
                growth.clean_radius()
            ))
        })?;
        levels.push(EscalationLevel {
            m,
            points: level.len(),
            pieces: chain.level_pieces[m].len(),
            exponent: fit.exponent,
            residual: fit.residual,
            fit_points: fit.points,
            clean_radius: growth.clean_radius().unwrap_or(0),
            growth: growth.with_fit(r_min),
        });
    }
    Ok(EscalationReport {
        base,
        s,
        r_min,
        center,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{generate_net, Model, Window};

    #[test]
    fn singletons_on_a_line_stay_linear() {
        let s = generate_net(Model::Z, &Window::Interval { lo: -200, hi: 200 }, 1.0, 1.0).unwrap();
        let n = s.len();
        let dec = ColoredDecomposition::new(
            (0..n as u32).collect::<Vec<_>>().chunks(40).map(|c| c.to_vec()).collect(),
            (0..n.div_ceil(40)).map(|k| (k % 2) as u32).collect(),
            1.0,
        );
        let base = central_piece(&s, &dec.pieces, 0..dec.len()).unwrap();
        let rep = escalation(&s, &dec, base, 1.0, 3, 8).unwrap();
        for l in &rep.levels {
            assert!(l.exponent > 0.7 && l.exponent < 1.1, "{l:?}");
        }
        assert_eq!(rep.levels[1].pieces, 3);
    }

    #[test]
    fn truncated_level_is_an_error() {
        let s = generate_net(Model::Z, &Window::Interval { lo: 0, hi: 20 }, 1.0, 1.0).unwrap();
        let dec = ColoredDecomposition::new(vec![(0..21).collect()], vec![0], 1.0);
        assert!(matches!(escalation(&s, &dec, 0, 1.0, 0, 15), Err(Error::Truncation(_))));
    }
}
