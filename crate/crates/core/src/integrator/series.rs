//! Start-up away from the singular point `r = 0`.
//!
//! Freezing the source at `w = α` and integrating `-(r^{n-1} w')' = r^{n-1}
//! g r^{-σ}` twice from `w(0) = α, w'(0) = 0` gives
//!
//! ```text
//! w(h)  = α - g h^{2-σ} / ((2-σ)(n-σ))
//! w'(h) = -g h^{1-σ} / (n-σ)
//! ```
//!
//! summed over every monomial of the row. Chain links use `σ = 0` and
//! `g = α_target`.

use super::IntegrationError;
use crate::system::{ReducedSystem, Row};

/// Values and first derivatives at `r = h0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesStart {
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

pub(crate) fn check_alpha(rs: &ReducedSystem, alpha: &[f64]) -> Result<(), IntegrationError> {
    if alpha.len() != rs.total_len() {
        return Err(IntegrationError::DimensionMismatch {
            expected: rs.total_len(),
            got: alpha.len(),
        });
    }
    if let Some((index, &value)) = alpha
        .iter()
        .enumerate()
        .find(|(_, &a)| !(a.is_finite() && a > 0.0))
    {
        return Err(IntegrationError::NonPositiveAlpha { index, value });
    }
    Ok(())
}

pub fn series_start(
    rs: &ReducedSystem,
    alpha: &[f64],
    h0: f64,
) -> Result<SeriesStart, IntegrationError> {
    check_alpha(rs, alpha)?;
    let n = rs.dim();
    let mut values = alpha.to_vec();
    let mut derivs = vec![0.0; alpha.len()];
    for (m, row) in rs.rows.iter().enumerate() {
        let mut add = |g: f64, sigma: f64| {
            values[m] -= g * h0.powf(2.0 - sigma) / ((2.0 - sigma) * (n - sigma));
            derivs[m] -= g * h0.powf(1.0 - sigma) / (n - sigma);
        };
        match row {
            Row::ChainLink(target) => add(alpha[*target], 0.0),
            Row::Source(monos) => {
                for mono in monos {
                    add(mono.amplitude(alpha), mono.sigma);
                }
            }
        }
    }
    Ok(SeriesStart { values, derivs })
}
