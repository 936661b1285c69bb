//! Energy and Pohozaev identities on ball trajectories.
//!
//! Scalar chain `w_1 … w_k` with `-Δw_k = c w_1^p r^{-σ}`:
//!
//! ```text
//! S   = ∫ w_1 f              G_j = ∫ ∇w_j·∇w_{k+1-j}     P_j = ∫ w_{j+1} w_{k+1-j}
//! (2-n) Σ G_j + n Σ P_j + 2(n-σ)/(1+p) S = ω R^n Σ_j w_j'(R) w_{k+1-j}'(R)
//! ```
//!
//! Cross system `u = w_1, v = w_{k+1}` with `-Δw_k = c₁ u^s v^q r^{-σ₁}`,
//! `-Δw_{2k} = c₂ v^t u^p r^{-σ₂}`:
//!
//! ```text
//! S₁ = ∫ v f₁   S₂ = ∫ u f₂   G_j = ∫ ∇w_j·∇w_{2k+1-j}   P_j = ∫ w_{j+1} w_{2k+1-j}
//! (2-n) Σ G_j + (n-σ₁)/(1+q) S₁ + (n-σ₂)/(1+p) S₂ + n Σ P_j
//!     = ω R^n Σ_j w_j'(R) w_{2k+1-j}'(R) - X₁ - X₂
//! X₁ = s/(1+q) ∫ c₁ v^{q+1} u^{s-1} r^{-σ₁} (r u')     (X₂ likewise)
//! ```
//!
//! Every energy integral equals the same `E` under Navier data.

use super::quadrature::{radial_integral, sphere_area};
use super::AnalysisError;
use crate::integrator::Trajectory;
use crate::system::{reduce, RecognizedShape, SystemSpec};
use serde::Serialize;

/// Boundary values below this fraction of the largest initial value count
/// as Navier data.
pub const NAVIER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyTerm {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PohozaevReport {
    pub shape: &'static str,
    pub radius: f64,
    pub energy_values: Vec<EnergyTerm>,
    /// `(max - min) / max |E|` over the energy values.
    pub energy_spread: f64,
    pub bracket: f64,
    /// Bracket times the mean energy.
    pub interior_combination: f64,
    /// Left-hand side assembled from the individual integrals.
    pub lhs: f64,
    pub boundary_flux: f64,
    pub extra_terms: f64,
    pub residual: f64,
    /// Every component vanishes at `R` (to [`NAVIER_TOL`]).
    pub navier_applicable: bool,
    pub boundary_max: f64,
    pub stride: usize,
}

struct Pieces<'a> {
    traj: &'a Trajectory,
    n: u32,
    stride: usize,
}

impl Pieces<'_> {
    fn integral(&self, g: &[f64], lead: f64) -> f64 {
        radial_integral(&self.traj.grid, g, self.n, lead, self.stride)
    }

    fn product(&self, a: usize, b: usize) -> f64 {
        let g: Vec<f64> = self.traj.values.iter().map(|w| w[a] * w[b]).collect();
        self.integral(&g, f64::from(self.n))
    }

    fn gradient(&self, a: usize, b: usize) -> f64 {
        let g: Vec<f64> = self.traj.derivs.iter().map(|d| d[a] * d[b]).collect();
        self.integral(&g, f64::from(self.n) + 2.0)
    }
}

fn spread(values: &[EnergyTerm]) -> f64 {
    let max = values
        .iter()
        .map(|e| e.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    let scale = values.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        (max - min) / scale
    } else {
        0.0
    }
}

fn term(name: String, value: f64) -> EnergyTerm {
    EnergyTerm { name, value }
}

/// Energy integrals and the Pohozaev balance on a trajectory ending at `R`,
/// with the quadrature using every `stride`-th grid point.
pub fn pohozaev_with_stride(
    traj: &Trajectory,
    spec: &SystemSpec,
    stride: usize,
) -> Result<PohozaevReport, AnalysisError> {
    let shape = RecognizedShape::of(spec).ok_or_else(|| {
        AnalysisError::NotApplicable(
            "identities are implemented for one-monomial scalar equations and two-equation cross systems"
                .into(),
        )
    })?;
    let rs = reduce(spec).map_err(|e| AnalysisError::NotApplicable(e.to_string()))?;
    let len = rs.total_len();
    if traj.len() < 3 {
        return Err(AnalysisError::QuadratureFailure(format!(
            "trajectory has {} points, at least 3 needed",
            traj.len()
        )));
    }
    if traj.num_components() != len {
        return Err(AnalysisError::NotApplicable(format!(
            "trajectory has {} components, the system has {len}",
            traj.num_components()
        )));
    }
    let n = spec.n;
    let nf = f64::from(n);
    let pieces = Pieces { traj, n, stride };
    let radius = traj.r_end().unwrap_or(0.0);
    let last_w = traj.values.last().unwrap();
    let last_d = traj.derivs.last().unwrap();
    let alpha_scale = traj.values[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let boundary_max = last_w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let area = sphere_area(n);
    let flux_scale = area * radius.powf(nf);

    let source = |row: usize, weight: usize| -> Vec<f64> {
        traj.grid
            .iter()
            .zip(&traj.values)
            .map(|(&r, w)| rs.rows[row].eval(r, w) * w[weight])
            .collect()
    };

    let mut energy = Vec::new();
    let (lhs, flux, extra);
    match shape {
        RecognizedShape::Scalar { k, sigma, p, .. } => {
            let k = k as usize;
            let s = pieces.integral(&source(k - 1, 0), nf - sigma);
            energy.push(term("source".into(), s));
            let mut sum_g = 0.0;
            for j in 1..=k {
                let g = pieces.gradient(j - 1, k - j);
                sum_g += g;
                energy.push(term(format!("grad_{j}"), g));
            }
            let mut sum_p = 0.0;
            for j in 1..k {
                let v = pieces.product(j, k - j);
                sum_p += v;
                energy.push(term(format!("prod_{j}"), v));
            }
            lhs = (2.0 - nf) * sum_g + nf * sum_p + 2.0 * (nf - sigma) / (1.0 + p) * s;
            flux = flux_scale * (1..=k).map(|j| last_d[j - 1] * last_d[k - j]).sum::<f64>();
            extra = 0.0;
        }
        RecognizedShape::Cross {
            k,
            s,
            q,
            sigma1,
            t,
            p,
            sigma2,
            ..
        } => {
            let k = k as usize;
            let (iu, iv) = (0, k);
            let s1 = pieces.integral(&source(k - 1, iv), nf - sigma1);
            let s2 = pieces.integral(&source(2 * k - 1, iu), nf - sigma2);
            energy.push(term("source_1".into(), s1));
            energy.push(term("source_2".into(), s2));
            let mut sum_g = 0.0;
            for j in 1..=k {
                let g = pieces.gradient(j - 1, 2 * k - j);
                sum_g += g;
                energy.push(term(format!("grad_{j}"), g));
            }
            let mut sum_p = 0.0;
            for j in 1..k {
                let v = pieces.product(j, 2 * k - j);
                sum_p += v;
                energy.push(term(format!("prod_{j}"), v));
            }
            lhs = (2.0 - nf) * sum_g
                + (nf - sigma1) / (1.0 + q) * s1
                + (nf - sigma2) / (1.0 + p) * s2
                + nf * sum_p;
            flux = flux_scale
                * (1..=k)
                    .map(|j| last_d[j - 1] * last_d[2 * k - j])
                    .sum::<f64>();
            // x·∇w = r w'; the cross terms vanish identically when s or t is 0
            let cross = |expo: f64, denom: f64, row: usize, own: usize, other: usize| -> f64 {
                if expo == 0.0 {
                    return 0.0;
                }
                let g: Vec<f64> = traj
                    .grid
                    .iter()
                    .zip(traj.values.iter().zip(&traj.derivs))
                    .map(|(&r, (w, d))| {
                        let f = rs.rows[row].eval(r, w);
                        // f · other / own = c other^{e+1} own^{expo-1} r^{-σ}
                        let ratio = if w[own] > 0.0 { w[other] / w[own] } else { 0.0 };
                        expo / denom * f * ratio * r * d[own]
                    })
                    .collect();
                pieces.integral(&g, nf)
            };
            extra = cross(s, 1.0 + q, k - 1, iu, iv) + cross(t, 1.0 + p, 2 * k - 1, iv, iu);
        }
    }

    let mean = energy.iter().map(|e| e.value).sum::<f64>() / energy.len() as f64;
    let bracket = shape.bracket();
    let rhs = flux - extra;
    let scale = lhs
        .abs()
        .max(rhs.abs())
        .max(energy.iter().map(|e| e.value.abs()).fold(0.0, f64::max));
    let residual = if scale > 0.0 {
        (lhs - rhs).abs() / scale
    } else {
        0.0
    };
    if !residual.is_finite() || energy.iter().any(|e| !e.value.is_finite()) {
        return Err(AnalysisError::QuadratureFailure(
            "non-finite integral".into(),
        ));
    }
    Ok(PohozaevReport {
        shape: match shape {
            RecognizedShape::Scalar { .. } => "scalar",
            RecognizedShape::Cross { .. } => "cross",
        },
        radius,
        energy_spread: spread(&energy),
        energy_values: energy,
        bracket,
        interior_combination: bracket * mean,
        lhs,
        boundary_flux: flux,
        extra_terms: extra,
        residual,
        navier_applicable: boundary_max <= NAVIER_TOL * alpha_scale,
        boundary_max,
        stride,
    })
}

/// Full-resolution report. Fails with `QuadratureFailure` when a residual
/// that is not already negligible does not drop when the grid is refined
/// from every other point to every point.
pub fn pohozaev_residual(
    traj: &Trajectory,
    spec: &SystemSpec,
) -> Result<PohozaevReport, AnalysisError> {
    let fine = pohozaev_with_stride(traj, spec, 1)?;
    if fine.residual > 1e-8 && traj.len() >= 5 {
        let coarse = pohozaev_with_stride(traj, spec, 2)?;
        if fine.residual >= coarse.residual {
            return Err(AnalysisError::QuadratureFailure(format!(
                "residual {:.3e} does not decrease under refinement (coarse {:.3e})",
                fine.residual, coarse.residual
            )));
        }
    }
    Ok(fine)
}

/// The energy integrals alone.
pub fn energy_identity(
    traj: &Trajectory,
    spec: &SystemSpec,
) -> Result<Vec<EnergyTerm>, AnalysisError> {
    Ok(pohozaev_with_stride(traj, spec, 1)?.energy_values)
}
