//! `D`-combs in the upper half-plane and their horizontal level sets.
//!
//! A `D`-comb is a geodesic spine `γ` together with the geodesic rays
//! `γ_i` leaving `γ(iD + φ)` orthogonally into a fixed side and ending on
//! the real axis. Cutting the comb at height `e^a` splits it into connected
//! components; for each component `C₀` and every level `c` the number of
//! points of `C₀` at height `e^c` is at most
//! `3 + 2·log 2 / D + 2(a₀ − c)/D`, where `e^{a₀}` is the top height of `C₀`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for comparing heights.
const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Spine {
    /// The vertical geodesic `x = x0`, parametrized as `(x0, e^t)`; teeth
    /// are the quarter circles centred at `x0`.
    Vertical { x0: f64 },
    /// The semicircle of the given centre and radius, parametrized as
    /// `(m + R tanh t, R / cosh t)`; teeth run inside the semicircle.
    Semicircle { center: f64, radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DComb {
    pub spine: Spine,
    /// Spacing `D` between tooth roots along the spine.
    pub spacing: f64,
    /// Parameter of the tooth with index 0.
    pub phase: f64,
}

/// A connected component of the comb below height `e^a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Component {
    /// Spine parameters in `[lo, hi]` with every tooth rooted there.
    Spine { lo: f64, hi: f64 },
    /// The part of tooth `i` below the cut; its root lies above it.
    Tooth { index: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCount {
    pub c: f64,
    pub a0: f64,
    pub count: usize,
    pub bound: f64,
}

impl LevelCount {
    pub fn holds(&self) -> bool {
        self.count as f64 <= self.bound + EPS
    }
}

/// `3 + 2·log 2 / D + 2(a₀ − c)/D`.
pub fn level_bound(spacing: f64, a0: f64, c: f64) -> f64 {
    3.0 + 2.0 * std::f64::consts::LN_2 / spacing + 2.0 * (a0 - c) / spacing
}

impl DComb {
    pub fn new(spine: Spine, spacing: f64, phase: f64) -> Result<Self> {
        if spacing.is_nan() || spacing <= 0.0 {
            return Err(Error::Parameter(format!("comb spacing must be positive, got {spacing}")));
        }
        if let Spine::Semicircle { radius, .. } = spine {
            if radius.is_nan() || radius <= 0.0 {
                return Err(Error::Parameter("semicircle spine needs a positive radius".into()));
            }
        }
        Ok(DComb { spine, spacing, phase })
    }

    /// Height of the spine at parameter `t`.
    pub fn spine_height(&self, t: f64) -> f64 {
        match self.spine {
            Spine::Vertical { .. } => t.exp(),
            Spine::Semicircle { radius, .. } => radius / t.cosh(),
        }
    }

    pub fn spine_point(&self, t: f64) -> (f64, f64) {
        match self.spine {
            Spine::Vertical { x0 } => (x0, t.exp()),
            Spine::Semicircle { center, radius } => (center + radius * t.tanh(), radius / t.cosh()),
        }
    }

    fn root(&self, i: i64) -> f64 {
        i as f64 * self.spacing + self.phase
    }

    /// Tooth indices whose root lies in `[lo, hi]`.
    fn teeth_in(&self, lo: f64, hi: f64) -> std::ops::RangeInclusive<i64> {
        let a = ((lo - self.phase) / self.spacing).ceil();
        let b = ((hi - self.phase) / self.spacing).floor();
        (a as i64)..=(b as i64)
    }

    /// Spine parameters at height `h`, if any.
    fn spine_at(&self, h: f64) -> Vec<f64> {
        match self.spine {
            Spine::Vertical { .. } => vec![h.ln()],
            Spine::Semicircle { radius, .. } => {
                let q = radius / h;
                if q < 1.0 - EPS {
                    vec![]
                } else if q <= 1.0 + EPS {
                    vec![0.0]
                } else {
                    let t = q.acosh();
                    vec![-t, t]
                }
            }
        }
    }

    /// Components of the comb within `ℝ × (0, e^a]`, with their `a₀`.
    /// Cut-off teeth are listed only for roots with parameter in `teeth`.
    pub fn components(&self, a: f64, teeth: (f64, f64)) -> Vec<(Component, f64)> {
        let cut = a.exp();
        let mut out = Vec::new();
        match self.spine {
            Spine::Vertical { .. } => {
                out.push((Component::Spine { lo: f64::NEG_INFINITY, hi: a }, a));
                for i in self.teeth_in(a.max(teeth.0), teeth.1) {
                    if self.root(i) > a {
                        out.push((Component::Tooth { index: i }, a));
                    }
                }
            }
            Spine::Semicircle { radius, .. } => {
                if radius <= cut {
                    out.push((
                        Component::Spine {
                            lo: f64::NEG_INFINITY,
                            hi: f64::INFINITY,
                        },
                        radius.ln(),
                    ));
                } else {
                    let ta = (radius / cut).acosh();
                    out.push((Component::Spine { lo: f64::NEG_INFINITY, hi: -ta }, a));
                    out.push((Component::Spine { lo: ta, hi: f64::INFINITY }, a));
                    for i in self.teeth_in(-ta, ta) {
                        let t = self.root(i);
                        if t > -ta && t < ta {
                            out.push((Component::Tooth { index: i }, a));
                        }
                    }
                }
            }
        }
        out
    }

    /// Number of points of `comp` at height `e^c`.
    ///
    /// Teeth descend monotonically from their root to the real axis, so a
    /// tooth meets the level once when its root is strictly higher; a root
    /// exactly at the level coincides with a spine point.
    pub fn level_count(&self, comp: Component, a: f64, c: f64) -> usize {
        let h = c.exp();
        let cut = a.exp();
        if h > cut * (1.0 + EPS) {
            return 0;
        }
        match comp {
            Component::Tooth { .. } => 1,
            Component::Spine { lo, hi } => {
                let on_spine = self
                    .spine_at(h)
                    .into_iter()
                    .filter(|&t| t >= lo - EPS && t <= hi + EPS)
                    .count();
                // Roots higher than the level lie where the spine is higher.
                let (tlo, thi) = match self.spine {
                    Spine::Vertical { .. } => (c, hi),
                    Spine::Semicircle { radius, .. } => {
                        let q = radius / h;
                        if q <= 1.0 {
                            return on_spine;
                        }
                        let t = q.acosh();
                        (lo.max(-t), hi.min(t))
                    }
                };
                if tlo > thi {
                    return on_spine;
                }
                let teeth = self
                    .teeth_in(tlo, thi)
                    .filter(|&i| self.spine_height(self.root(i)) > h * (1.0 + EPS))
                    .count();
                on_spine + teeth
            }
        }
    }

    /// Counts every component at every level in `levels` and compares with
    /// [`level_bound`].
    pub fn check_levels(&self, a: f64, levels: &[f64]) -> Vec<LevelCount> {
        let span = levels.iter().fold(0.0f64, |m, &c| m.max((a - c).abs())) + 4.0 * self.spacing;
        let mut out = Vec::new();
        for (comp, a0) in self.components(a, (a - span, a + span)) {
            for &c in levels {
                if c > a0 + EPS {
                    continue;
                }
                out.push(LevelCount {
                    c,
                    a0,
                    count: self.level_count(comp, a, c),
                    bound: level_bound(self.spacing, a0, c),
                });
            }
        }
        out
    }

    /// Levels worth checking below `a0`: a uniform grid together with the
    /// heights just above and below every tooth root in range.
    pub fn critical_levels(&self, a0: f64, depth: f64, grid: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..=grid).map(|k| a0 - depth * k as f64 / grid as f64).collect();
        let (lo, hi) = match self.spine {
            Spine::Vertical { .. } => (a0 - depth, a0),
            Spine::Semicircle { radius, .. } => {
                let t = (radius / (a0 - depth).exp()).max(1.0).acosh();
                (-t, t)
            }
        };
        for i in self.teeth_in(lo, hi) {
            let c = self.spine_height(self.root(i)).ln();
            if c <= a0 && c >= a0 - depth {
                v.push(c - 1e-7);
                v.push((c + 1e-7).min(a0));
            }
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_comb_counts() {
        let comb = DComb::new(Spine::Vertical { x0: 0.0 }, 1.0, 0.5).unwrap();
        // Below e^a = e^3 the main component has the spine and the teeth
        // rooted at 0.5, 1.5, 2.5; the level e^1 meets the spine and the
        // teeth rooted at 1.5 and 2.5.
        let comps = comb.components(3.0, (0.0, 3.0));
        let (main, _) = comps[0];
        assert_eq!(comb.level_count(main, 3.0, 1.0), 3);
        assert_eq!(comb.level_count(main, 3.0, 0.0), 4);
    }

    #[test]
    fn semicircle_splits_when_cut_below_top() {
        let comb = DComb::new(
            Spine::Semicircle {
                center: 0.0,
                radius: 10.0,
            },
            0.7,
            0.1,
        )
        .unwrap();
        let comps = comb.components(1.0, (-10.0, 10.0));
        let spines = comps
            .iter()
            .filter(|(c, _)| matches!(c, Component::Spine { .. }))
            .count();
        assert_eq!(spines, 2);
        assert!(comps.iter().any(|(c, _)| matches!(c, Component::Tooth { .. })));
    }

    #[test]
    fn bound_holds_on_a_whole_semicircle() {
        let comb = DComb::new(
            Spine::Semicircle {
                center: 3.0,
                radius: 2.0,
            },
            0.5,
            0.2,
        )
        .unwrap();
        let a = 5.0;
        let comps = comb.components(a, (-20.0, 20.0));
        assert_eq!(comps.len(), 1);
        let a0 = comps[0].1;
        assert!((a0 - 2f64.ln()).abs() < 1e-12);
        let levels = comb.critical_levels(a0, 8.0, 200);
        for lc in comb.check_levels(a, &levels) {
            assert!(lc.holds(), "{lc:?}");
        }
    }
}
