//! Algebraic tail fits `w ~ C r^{rate}` on decaying profiles.

use super::AnalysisError;
use crate::integrator::Trajectory;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub component: usize,
    pub fitted_rate: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    pub points: usize,
    /// Root mean square of the residual in `ln w`.
    pub rms: f64,
}

/// Least-squares line through `(ln r, ln w_m)` over grid points in
/// `[r_lo, r_hi]`.
pub fn decay_fit(
    traj: &Trajectory,
    component: usize,
    r_lo: f64,
    r_hi: f64,
) -> Result<DecayFit, AnalysisError> {
    if !(r_lo < r_hi) || component >= traj.num_components() {
        return Err(AnalysisError::WindowTooShort { points: 0 });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = traj
        .grid
        .iter()
        .zip(&traj.values)
        .filter(|(r, w)| **r >= r_lo && **r <= r_hi && w[component] > 0.0)
        .map(|(r, w)| (r.ln(), w[component].ln()))
        .unzip();
    let m = xs.len();
    if m < 3 || xs[m - 1] - xs[0] < 0.5 * (r_hi / r_lo).ln() {
        return Err(AnalysisError::WindowTooShort { points: m });
    }
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let rate = sxy / sxx;
    let intercept = my - rate * mx;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - rate * x).powi(2))
        .sum::<f64>()
        / mf)
        .sqrt();
    if rate >= 0.0 {
        return Err(AnalysisError::NonDecayingTail { rate });
    }
    Ok(DecayFit {
        component,
        fitted_rate: rate,
        prefactor: intercept.exp(),
        window: (r_lo, r_hi),
        points: m,
        rms,
    })
}
