//! Upper half-space geometry: distances, Möbius maps and geodesics.
//!
//! Points of ℍ^d are stored as `(x_1, …, x_{d-1}, y)` with `y > 0`.

/// Hyperbolic distance in the upper half-plane.
///
/// Uses `d = 2·asinh(sqrt(q/2))` with `q = (Δx² + Δy²)/(2·y₁·y₂)`, which equals
/// `arcosh(1 + q)` but keeps full precision for nearby points.
pub fn h2_distance(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let dx = x1 - x2;
    let dy = y1 - y2;
    let q = (dx * dx + dy * dy) / (2.0 * y1 * y2);
    2.0 * (q / 2.0).sqrt().asinh()
}

/// Hyperbolic distance in the upper half-space, coordinates `(x…, y)`.
pub fn hd_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        let t = a[i] - b[i];
        s += t * t;
    }
    let q = s / (2.0 * a[n - 1] * b[n - 1]);
    2.0 * (q / 2.0).sqrt().asinh()
}

/// Value of `cosh` of the distance minus one, monotone in the distance.
/// Cheaper than [`hd_distance`] for threshold comparisons.
pub fn hd_cosh_minus_one(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        let t = a[i] - b[i];
        s += t * t;
    }
    s / (2.0 * a[n - 1] * b[n - 1])
}

/// Euclidean description of the hyperbolic ball `B(c, r)` in the upper
/// half-space: a Euclidean ball with the same horizontal centre, centre
/// height `y·cosh r` and radius `y·sinh r`.
pub fn euclidean_ball(center: &[f64], r: f64) -> (Vec<f64>, f64) {
    let n = center.len();
    let y = center[n - 1];
    let mut c = center.to_vec();
    c[n - 1] = y * r.cosh();
    (c, y * r.sinh())
}

/// A real Möbius transformation `z ↦ (a z + b)/(c z + d)`, optionally
/// preceded by the reflection `z ↦ -z̄`.
///
/// Matrices are kept with determinant 1; orientation reversal is carried by
/// `mirrored` so that the matrix itself never has determinant −1.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Mobius {
    pub m: [[f64; 2]; 2],
    pub mirrored: bool,
}

impl Mobius {
    pub fn identity() -> Self {
        Mobius {
            m: [[1.0, 0.0], [0.0, 1.0]],
            mirrored: false,
        }
    }

    /// Builds a map from a matrix with positive determinant, rescaling it to
    /// determinant 1.
    pub fn from_matrix(a: f64, b: f64, c: f64, d: f64) -> Self {
        let det = a * d - b * c;
        assert!(det > 0.0, "Möbius matrix must have positive determinant");
        let s = det.sqrt();
        Mobius {
            m: [[a / s, b / s], [c / s, d / s]],
            mirrored: false,
        }
    }

    /// Dilation `z ↦ t z`.
    pub fn dilation(t: f64) -> Self {
        Self::from_matrix(t, 0.0, 0.0, 1.0)
    }

    /// The reflection `z ↦ -z̄` in the imaginary axis.
    pub fn reflection() -> Self {
        Mobius {
            m: [[1.0, 0.0], [0.0, 1.0]],
            mirrored: true,
        }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let x = if self.mirrored { -x } else { x };
        let [[a, b], [c, d]] = self.m;
        // (a z + b)/(c z + d) with z = x + i y
        let nr = a * x + b;
        let ni = a * y;
        let dr = c * x + d;
        let di = c * y;
        let den = dr * dr + di * di;
        ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
    }

    /// Image of a boundary point; `None` stands for ∞.
    pub fn apply_boundary(&self, t: Option<f64>) -> Option<f64> {
        let [[a, b], [c, d]] = self.m;
        match t {
            None => {
                if c == 0.0 {
                    None
                } else {
                    Some(a / c)
                }
            }
            Some(t) => {
                let t = if self.mirrored { -t } else { t };
                let den = c * t + d;
                if den == 0.0 {
                    None
                } else {
                    Some((a * t + b) / den)
                }
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        // Conjugating a matrix by the reflection flips the sign of its
        // off-diagonal entries.
        let o = if self.mirrored {
            let [[a, b], [c, d]] = other.m;
            [[a, -b], [-c, d]]
        } else {
            other.m
        };
        let s = self.m;
        let m = [
            [
                s[0][0] * o[0][0] + s[0][1] * o[1][0],
                s[0][0] * o[0][1] + s[0][1] * o[1][1],
            ],
            [
                s[1][0] * o[0][0] + s[1][1] * o[1][0],
                s[1][0] * o[0][1] + s[1][1] * o[1][1],
            ],
        ];
        Mobius {
            m,
            mirrored: self.mirrored ^ other.mirrored,
        }
    }

    pub fn inverse(&self) -> Mobius {
        let [[a, b], [c, d]] = self.m;
        let inv = [[d, -b], [-c, a]];
        if self.mirrored {
            Mobius {
                m: [[inv[0][0], -inv[0][1]], [-inv[1][0], inv[1][1]]],
                mirrored: true,
            }
        } else {
            Mobius {
                m: inv,
                mirrored: false,
            }
        }
    }
}

/// Point at signed arclength `s` from `p` along the geodesic from `p` to `q`
/// in the upper half-plane.
pub fn geodesic_point(p: (f64, f64), q: (f64, f64), s: f64) -> (f64, f64) {
    let (x1, y1) = p;
    let (x2, y2) = q;
    let scale = x1.abs().max(x2.abs()).max(y1).max(y2);
    if (x1 - x2).abs() <= 1e-12 * scale {
        let dir = if y2 >= y1 { 1.0 } else { -1.0 };
        return (x1, y1 * (dir * s).exp());
    }
    let c = ((x2 * x2 + y2 * y2) - (x1 * x1 + y1 * y1)) / (2.0 * (x2 - x1));
    let rho = ((x1 - c).powi(2) + y1 * y1).sqrt();
    let th1 = y1.atan2(x1 - c);
    let th2 = y2.atan2(x2 - c);
    // arclength parameter along a semicircle: u = ln tan(θ/2)
    let u1 = (th1 / 2.0).tan().ln();
    let u2 = (th2 / 2.0).tan().ln();
    let u = if u2 >= u1 { u1 + s } else { u1 - s };
    let th = 2.0 * u.exp().atan();
    (c + rho * th.cos(), rho * th.sin())
}

/// Points spaced at most `step` apart (in arclength) along the geodesic
/// segment `[p, q]`, endpoints included.
pub fn geodesic_samples(p: (f64, f64), q: (f64, f64), step: f64) -> Vec<(f64, f64)> {
    let len = h2_distance(p.0, p.1, q.0, q.1);
    let n = (len / step).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| {
            if i == n {
                q
            } else {
                geodesic_point(p, q, len * i as f64 / n as f64)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcosh_ref(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
        let t = 1.0 + ((x1 - x2).powi(2) + (y1 - y2).powi(2)) / (2.0 * y1 * y2);
        (t + (t * t - 1.0).sqrt()).ln()
    }

    #[test]
    fn vertical_distance_is_log_ratio() {
        let d = h2_distance(0.0, 1.0, 0.0, std::f64::consts::E);
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unit_horizontal_distance() {
        // arcosh(1.5) = ln(1.5 + sqrt(1.25)), evaluated independently.
        let expect = (1.5f64 + 1.25f64.sqrt()).ln();
        assert!((expect - 0.962_423_650_119_206_9).abs() < 1e-15);
        assert!((h2_distance(0.0, 1.0, 1.0, 1.0) - expect).abs() < 1e-14);
    }

    #[test]
    fn agrees_with_arcosh_form() {
        let pts = [(0.3, 0.7), (-2.0, 5.0), (10.0, 0.01), (0.0, 1.0)];
        for &(a, b) in &pts {
            for &(c, d) in &pts {
                let x = h2_distance(a, b, c, d);
                let y = arcosh_ref(a, b, c, d);
                assert!((x - y).abs() < 1e-9 * (1.0 + y), "{x} {y}");
            }
        }
    }

    #[test]
    fn mobius_preserves_distance() {
        let g = Mobius::from_matrix(2.0, 1.0, 1.0, 1.0);
        let r = Mobius::reflection().compose(&g);
        for m in [g, r] {
            assert!((m.det() - 1.0).abs() < 1e-12);
            let p = (0.4, 1.3);
            let q = (-1.1, 0.2);
            let (a, b) = m.apply(p.0, p.1);
            let (c, d) = m.apply(q.0, q.1);
            let before = h2_distance(p.0, p.1, q.0, q.1);
            let after = h2_distance(a, b, c, d);
            assert!((before - after).abs() < 1e-10);
            let inv = m.inverse();
            let (x, y) = inv.apply(a, b);
            assert!((x - p.0).abs() < 1e-12 && (y - p.1).abs() < 1e-12);
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let f = Mobius::from_matrix(3.0, 1.0, 1.0, 1.0);
        let g = Mobius::reflection().compose(&Mobius::dilation(2.5));
        let h = f.compose(&g);
        let (x, y) = g.apply(0.3, 0.8);
        let (x, y) = f.apply(x, y);
        let (u, v) = h.apply(0.3, 0.8);
        assert!((x - u).abs() < 1e-12 && (y - v).abs() < 1e-12);
        let k = g.compose(&f);
        let (x, y) = f.apply(-0.6, 2.0);
        let (x, y) = g.apply(x, y);
        let (u, v) = k.apply(-0.6, 2.0);
        assert!((x - u).abs() < 1e-12 && (y - v).abs() < 1e-12);
    }

    #[test]
    fn geodesic_samples_lie_on_geodesic() {
        let p = (-1.0, 0.5);
        let q = (2.0, 1.5);
        let d = h2_distance(p.0, p.1, q.0, q.1);
        for s in geodesic_samples(p, q, 0.1) {
            let a = h2_distance(p.0, p.1, s.0, s.1);
            let b = h2_distance(s.0, s.1, q.0, q.1);
            assert!((a + b - d).abs() < 1e-9);
        }
        let s = geodesic_samples((0.0, 1.0), (0.0, 5.0), 0.2);
        assert!(s.iter().all(|p| p.0 == 0.0));
    }

    #[test]
    fn euclidean_ball_boundary_is_at_radius() {
        let (c, rho) = euclidean_ball(&[0.5, 2.0], 3.0);
        let top = [0.5, c[1] + rho];
        let bottom = [0.5, c[1] - rho];
        assert!((hd_distance(&[0.5, 2.0], &top) - 3.0).abs() < 1e-9);
        assert!((hd_distance(&[0.5, 2.0], &bottom) - 3.0).abs() < 1e-9);
    }
}
