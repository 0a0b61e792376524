//! Window-scale metrology: growth fits, distortion profiles, radial
//! sublinearity, quasi-convexity defect and neighbourhood escalation.

pub mod defect;
pub mod distortion;
pub mod escalation;
pub mod growth;
pub mod sublinear;

pub use defect::{quasi_convexity_defect, DefectOptions, DefectReport};
pub use distortion::{anchored_profile, distortion_profile, DistortionOptions, DistortionProfile};
pub use escalation::{central_piece, escalation, EscalationReport};
pub use growth::{ball_growth, fit_growth, piece_growth, subexp_stat, GrowthFit, GrowthReport, SubexpStat};
pub use sublinear::{diameter, radial_sublinearity, SublinearityReport};

/// Ordinary least squares `y ≈ slope·x + intercept`, with the root mean
/// square residual.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (slope, intercept, (ss / n).sqrt())
}
