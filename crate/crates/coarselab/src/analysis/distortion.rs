use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::MapRecord;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionOptions {
    /// Pairs are enumerated exhaustively up to this count, sampled beyond.
    pub pair_cap: u64,
    pub seed: u64,
    /// Basepoint of the anchored variant.
    pub anchor: Option<usize>,
}

impl Default for DistortionOptions {
    fn default() -> Self {
        DistortionOptions {
            pair_cap: 1_000_000,
            seed: 0,
            anchor: None,
        }
    }
}

/// Target distances for source distances in `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub lo: f64,
    pub hi: f64,
    pub pairs: u64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Fits of the form `target ≤ C·log(1 + source) + C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    /// Least-squares `C` against the bucket maxima.
    pub fitted_c: f64,
    /// Smallest `C` valid for every pair.
    pub envelope_c: f64,
    /// False when the bucket ratios keep growing, i.e. the distortion is
    /// not logarithmic at window scale.
    pub ok: bool,
}

/// `target ≤ L·source + D` and `source ≤ L·target + L·D`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub l: f64,
    pub d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchoredProfile {
    pub anchor: usize,
    pub buckets: Vec<Bucket>,
    pub log_fit: LogFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionProfile {
    pub source: String,
    pub target: String,
    pub pairs: u64,
    pub exhaustive: bool,
    pub buckets: Vec<Bucket>,
    pub log_fit: LogFit,
    pub affine: AffineFit,
    pub anchored: Option<AnchoredProfile>,
}

/// Dyadic bucket index of a source distance: `[0,1)`, `[1,2)`, `[2,4)`, ….
fn bucket_of(s: f64) -> usize {
    if s < 1.0 {
        0
    } else {
        1 + s.log2().floor() as usize
    }
}

fn bucket_bounds(k: usize) -> (f64, f64) {
    if k == 0 {
        (0.0, 1.0)
    } else {
        (2f64.powi(k as i32 - 1), 2f64.powi(k as i32))
    }
}

#[derive(Default)]
struct Acc {
    buckets: Vec<(u64, f64, f64, f64)>,
    envelope: f64,
    st: f64,
    ss: f64,
    pairs: Vec<(f64, f64)>,
}

impl Acc {
    fn add(&mut self, s: f64, t: f64, keep: bool) {
        let k = bucket_of(s);
        if self.buckets.len() <= k {
            self.buckets.resize(k + 1, (0, f64::INFINITY, 0.0, 0.0));
        }
        let b = &mut self.buckets[k];
        b.0 += 1;
        b.1 = b.1.min(t);
        b.2 = b.2.max(t);
        b.3 += t;
        self.envelope = self.envelope.max(t / (1.0 + s.ln_1p()));
        self.st += s * t;
        self.ss += s * s;
        if keep {
            self.pairs.push((s, t));
        }
    }

    fn buckets(&self) -> Vec<Bucket> {
        self.buckets
            .iter()
            .enumerate()
            .filter(|(_, b)| b.0 > 0)
            .map(|(k, b)| {
                let (lo, hi) = bucket_bounds(k);
                Bucket {
                    lo,
                    hi,
                    pairs: b.0,
                    min: b.1,
                    max: b.2,
                    mean: b.3 / b.0 as f64,
                }
            })
            .collect()
    }

    fn log_fit(&self) -> LogFit {
        let buckets = self.buckets();
        let g = |b: &Bucket| 1.0 + b.hi.ln_1p();
        let num: f64 = buckets.iter().map(|b| b.max * g(b)).sum();
        let den: f64 = buckets.iter().map(|b| g(b) * g(b)).sum();
        // Ratios of bucket maxima to the log profile at the bucket's lower
        // end; logarithmic distortion keeps them bounded.
        let ratio: Vec<f64> = buckets
            .iter()
            .filter(|b| b.lo >= 1.0)
            .map(|b| b.max / (1.0 + b.lo.ln_1p()))
            .collect();
        let ok = match ratio.len() {
            0..=2 => true,
            n => ratio[n - 1] <= 1.25 * ratio[n / 2],
        };
        LogFit {
            fitted_c: if den > 0.0 { num / den } else { 0.0 },
            envelope_c: self.envelope,
            ok,
        }
    }
}

/// Distance profile of `f` over source pairs: exhaustive when the number of
/// pairs is at most `pair_cap`, otherwise `pair_cap` pairs drawn uniformly
/// with the seeded generator.
pub fn distortion_profile(f: &MapRecord, opts: &DistortionOptions) -> DistortionProfile {
    let n = f.source.len() as u64;
    let total = n * n.saturating_sub(1) / 2;
    let exhaustive = total <= opts.pair_cap;
    let mut acc = Acc::default();
    let visit = |a: usize, b: usize, acc: &mut Acc| {
        let s = f.source.dist(a, b);
        let t = f.target.dist(f.assignment[a], f.assignment[b]);
        acc.add(s, t, true);
    };
    if exhaustive {
        for a in 0..n as usize {
            for b in a + 1..n as usize {
                visit(a, b, &mut acc);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut drawn = 0;
        while drawn < opts.pair_cap {
            let a = rng.gen_range(0..n as usize);
            let b = rng.gen_range(0..n as usize);
            if a != b {
                visit(a, b, &mut acc);
                drawn += 1;
            }
        }
    }
    let slope = if acc.ss > 0.0 { acc.st / acc.ss } else { 1.0 };
    let l = if slope > 0.0 { slope.max(1.0 / slope) } else { f64::INFINITY };
    let d = acc
        .pairs
        .iter()
        .map(|&(s, t)| (t - l * s).max(s / l - t).max(0.0))
        .fold(0.0, f64::max);
    let anchored = opts.anchor.map(|a| anchored_profile(f, a));
    DistortionProfile {
        source: f.source.name.clone(),
        target: f.target.name.clone(),
        pairs: acc.pairs.len() as u64,
        exhaustive,
        buckets: acc.buckets(),
        log_fit: acc.log_fit(),
        affine: AffineFit { l, d },
        anchored,
    }
}

/// Profile of `d(f(a), f(b))` against `d(a, b)` for fixed `a` and every `b`.
pub fn anchored_profile(f: &MapRecord, anchor: usize) -> AnchoredProfile {
    let mut acc = Acc::default();
    let fa = f.assignment[anchor];
    for b in 0..f.source.len() {
        if b != anchor {
            acc.add(f.source.dist(anchor, b), f.target.dist(fa, f.assignment[b]), false);
        }
    }
    AnchoredProfile {
        anchor,
        buckets: acc.buckets(),
        log_fit: acc.log_fit(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::Provenance;
    use crate::spaces::{generate_net, Model, Window};
    use std::sync::Arc;

    #[test]
    fn identity_profile() {
        let s = Arc::new(generate_net(Model::Z, &Window::Interval { lo: -200, hi: 200 }, 1.0, 1.0).unwrap());
        let f = MapRecord::new(s.clone(), s.clone(), (0..s.len()).collect(), Provenance::new("identity")).unwrap();
        let p = distortion_profile(&f, &DistortionOptions::default());
        assert!(p.exhaustive);
        assert_eq!(p.affine, AffineFit { l: 1.0, d: 0.0 });
        assert!(!p.log_fit.ok);
        for b in &p.buckets {
            assert!(b.max >= b.mean && b.mean >= b.min);
        }
    }
}
