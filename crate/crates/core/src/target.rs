//! The target map `ψ` on the closed positive cone and the chart maps
//! between the mass simplex `A_a` and the boundary region `B_a`.

use crate::integrator::{shoot, IntegrationError, IvpControls, Outcome};
use crate::system::ReducedSystem;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetCase {
    #[serde(rename = "boundary")]
    BoundaryIdentity,
    WallHit,
    #[serde(rename = "decay")]
    DecayLimit,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetResult {
    pub alpha: Vec<f64>,
    pub psi: Vec<f64>,
    pub case: TargetCase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hit_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_end: Option<f64>,
}

impl TargetResult {
    pub fn psi_norm(&self) -> f64 {
        self.psi.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Lowest index attaining the minimum of `ψ`.
    pub fn argmin(&self) -> usize {
        argmin(&self.psi)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TargetError {
    #[error("component sum {sum} exceeds the mass a = {a}")]
    MassExceeded { sum: f64, a: f64 },
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub(crate) fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

/// Evaluates `ψ(α)` for `α ≥ 0`. Points on the boundary are returned
/// unchanged without integrating.
pub fn psi(
    rs: &ReducedSystem,
    alpha: &[f64],
    c: &IvpControls,
) -> Result<TargetResult, IntegrationError> {
    if alpha.len() != rs.total_len() {
        return Err(IntegrationError::DimensionMismatch {
            expected: rs.total_len(),
            got: alpha.len(),
        });
    }
    if let Some((index, &value)) = alpha
        .iter()
        .enumerate()
        .find(|(_, &a)| !(a.is_finite() && a >= 0.0))
    {
        return Err(IntegrationError::NonPositiveAlpha { index, value });
    }
    if alpha.contains(&0.0) {
        return Ok(TargetResult {
            alpha: alpha.to_vec(),
            psi: alpha.to_vec(),
            case: TargetCase::BoundaryIdentity,
            r0: None,
            hit_index: None,
            r_end: None,
        });
    }
    let run = shoot(rs, alpha, c, false)?;
    Ok(from_outcome(alpha, run.outcome))
}

pub(crate) fn from_outcome(alpha: &[f64], outcome: Outcome) -> TargetResult {
    let alpha = alpha.to_vec();
    match outcome {
        Outcome::WallHit {
            r0,
            hit_index,
            mut state,
        } => {
            state[hit_index] = 0.0;
            TargetResult {
                alpha,
                psi: state,
                case: TargetCase::WallHit,
                r0: Some(r0),
                hit_index: Some(hit_index),
                r_end: None,
            }
        }
        Outcome::Decayed { r_end, limit } => TargetResult {
            alpha,
            psi: limit,
            case: TargetCase::DecayLimit,
            r0: None,
            hit_index: None,
            r_end: Some(r_end),
        },
        Outcome::Truncated { r_end, state } => TargetResult {
            alpha,
            psi: state,
            case: TargetCase::Unresolved,
            r0: None,
            hit_index: None,
            r_end: Some(r_end),
        },
    }
}

/// `φ(α) = α + (a - Σα)/L · (1, …, 1)`, from `B_a` onto `A_a`.
pub fn phi(alpha: &[f64], a: f64) -> Result<Vec<f64>, TargetError> {
    let sum: f64 = alpha.iter().sum();
    if sum > a + 1e-12 * a.abs().max(1.0) {
        return Err(TargetError::MassExceeded { sum, a });
    }
    let shift = (a - sum) / alpha.len() as f64;
    Ok(alpha.iter().map(|x| x + shift).collect())
}

/// `φ⁻¹(β) = β - min(β) · (1, …, 1)`.
pub fn phi_inverse(beta: &[f64]) -> Vec<f64> {
    let m = beta.iter().copied().fold(f64::INFINITY, f64::min);
    beta.iter().map(|x| x - m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{reduce, EquationSpec, Monomial, SystemSpec};
    use proptest::prelude::*;

    fn scalar(p: f64) -> ReducedSystem {
        reduce(&SystemSpec {
            n: 3,
            equations: vec![EquationSpec {
                order: 1,
                monomials: vec![Monomial::new(1.0, 0.0, vec![p])],
            }],
        })
        .unwrap()
    }

    fn lane_emden(p: f64) -> ReducedSystem {
        reduce(&SystemSpec {
            n: 3,
            equations: vec![
                EquationSpec {
                    order: 1,
                    monomials: vec![Monomial::new(1.0, 0.0, vec![0.0, p])],
                },
                EquationSpec {
                    order: 1,
                    monomials: vec![Monomial::new(1.0, 0.0, vec![p, 0.0])],
                },
            ],
        })
        .unwrap()
    }

    #[test]
    fn boundary_point_is_fixed() {
        let rs = lane_emden(5.0);
        let r = psi(&rs, &[0.0, 1.0], &IvpControls::default()).unwrap();
        assert_eq!(r.case, TargetCase::BoundaryIdentity);
        assert_eq!(r.psi, vec![0.0, 1.0]);
    }

    #[test]
    fn critical_scalar_decays_to_zero() {
        let rs = scalar(5.0);
        for alpha in [0.3, 1.0, 3f64.powf(0.25), 4.0] {
            let r = psi(&rs, &[alpha], &IvpControls::default()).unwrap();
            assert_eq!(r.case, TargetCase::DecayLimit, "alpha = {alpha}");
            assert!(r.psi_norm() < 1e-6);
        }
    }

    #[test]
    fn subcritical_scalar_hits_wall() {
        let r = psi(&scalar(2.0), &[1.0], &IvpControls::default()).unwrap();
        assert_eq!(r.case, TargetCase::WallHit);
        assert_eq!(r.psi, vec![0.0]);
        assert_eq!(r.hit_index, Some(0));
    }

    #[test]
    fn json_case_names() {
        let r = psi(&scalar(2.0), &[0.0], &IvpControls::default()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(text, r#"{"alpha":[0.0],"psi":[0.0],"case":"boundary"}"#);
        for (case, name) in [
            (TargetCase::WallHit, "\"wall_hit\""),
            (TargetCase::DecayLimit, "\"decay\""),
            (TargetCase::Unresolved, "\"unresolved\""),
        ] {
            assert_eq!(serde_json::to_string(&case).unwrap(), name);
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&[0.0, 0.0], 1.0).unwrap(), vec![0.5, 0.5]);
        let v = phi(&[0.0, 0.4], 1.0).unwrap();
        assert!((v[0] - 0.3).abs() < 1e-15 && (v[1] - 0.7).abs() < 1e-15);
        assert_eq!(phi(&[0.0, 1.0, 2.0], 3.0).unwrap(), vec![0.0, 1.0, 2.0]);
        assert!(matches!(
            phi(&[0.0, 2.0], 1.0),
            Err(TargetError::MassExceeded { .. })
        ));
        assert_eq!(phi_inverse(&[0.5, 0.5]), vec![0.0, 0.0]);
        let w = phi_inverse(&[0.3, 0.7]);
        assert!(w[0] == 0.0 && (w[1] - 0.4).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn phi_round_trip(raw in proptest::collection::vec(0.0f64..1.0, 2..6), a in 0.1f64..10.0) {
            let s: f64 = raw.iter().sum::<f64>().max(1e-9);
            let beta: Vec<f64> = raw.iter().map(|x| a * x / s).collect();
            let back = phi(&phi_inverse(&beta), a).unwrap();
            for (x, y) in back.iter().zip(&beta) {
                prop_assert!((x - y).abs() <= 1e-12 * a.max(1.0));
            }
        }
    }
}
