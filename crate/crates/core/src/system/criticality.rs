//! Sub/super-criticality of the two recognized monomial shapes.
//!
//! * scalar: `(-Δ)^k u = c u^p / |x|^σ`, supercritical-or-critical iff
//!   `p >= (n + 2k - 2σ) / (n - 2k)`;
//! * cross system: `(-Δ)^k u = c₁ u^s v^q / |x|^{σ₁}`,
//!   `(-Δ)^k v = c₂ v^t u^p / |x|^{σ₂}`, existence condition
//!   `(n - σ₁)/(1 + q) + (n - σ₂)/(1 + p) <= n - 2k`.
//!
//! Everything else is reported as not classifiable.

use super::{validate, SystemSpec};
use serde::{Deserialize, Serialize};

/// Relative tolerance used to call a comparison an equality.
const EQ_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalityClass {
    Subcritical,
    Critical,
    Supercritical,
    NotClassifiable,
}

impl CriticalityClass {
    /// True for the classes in which the Navier problem has no solution on
    /// any ball, so shooting is expected to find an entire solution.
    pub fn admits_entire_solution(self) -> bool {
        matches!(self, Self::Critical | Self::Supercritical)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalityRule {
    /// `p >= (n + 2k - 2σ)/(n - 2k)`.
    ScalarExponent,
    /// `(n - σ₁)/(1 + q) + (n - σ₂)/(1 + p) <= n - 2k`.
    CrossSystem,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub class: CriticalityClass,
    /// The evaluated bound: `(n+2k-2σ)/(n-2k)` for the scalar rule, `n - 2k`
    /// for the cross-system rule.
    pub threshold_value: f64,
    /// The quantity compared against the bound: `p`, or the left-hand sum.
    pub compared_value: f64,
    /// The Pohozaev bracket; `<= 0` exactly when the class is critical or
    /// supercritical.
    pub bracket: f64,
    pub rule: CriticalityRule,
    pub reason: String,
}

/// Parameters of a recognized shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecognizedShape {
    Scalar {
        n: f64,
        k: f64,
        sigma: f64,
        p: f64,
    },
    /// Equation 0 is `u^s v^q / r^{σ₁}`, equation 1 is `v^t u^p / r^{σ₂}`.
    Cross {
        n: f64,
        k: f64,
        s: f64,
        q: f64,
        sigma1: f64,
        t: f64,
        p: f64,
        sigma2: f64,
    },
}

impl RecognizedShape {
    pub fn of(spec: &SystemSpec) -> Option<Self> {
        let n = f64::from(spec.n);
        match spec.equations.as_slice() {
            [eq] if eq.monomials.len() == 1 => {
                let m = &eq.monomials[0];
                let p = *m.powers.first()?;
                (m.powers.len() == 1 && p > 0.0).then_some(Self::Scalar {
                    n,
                    k: f64::from(eq.order),
                    sigma: m.sigma,
                    p,
                })
            }
            [e1, e2]
                if e1.order == e2.order && e1.monomials.len() == 1 && e2.monomials.len() == 1 =>
            {
                let m1 = &e1.monomials[0];
                let m2 = &e2.monomials[0];
                if m1.powers.len() != 2 || m2.powers.len() != 2 {
                    return None;
                }
                let (s, q) = (m1.powers[0], m1.powers[1]);
                let (p, t) = (m2.powers[0], m2.powers[1]);
                (q > 0.0 && p > 0.0).then_some(Self::Cross {
                    n,
                    k: f64::from(e1.order),
                    s,
                    q,
                    sigma1: m1.sigma,
                    t,
                    p,
                    sigma2: m2.sigma,
                })
            }
            _ => None,
        }
    }

    /// The Pohozaev bracket multiplying the energy.
    pub fn bracket(&self) -> f64 {
        match *self {
            Self::Scalar { n, k, sigma, p } => scalar_bracket(n, k, sigma, p),
            Self::Cross {
                n,
                k,
                q,
                sigma1,
                p,
                sigma2,
                ..
            } => system_bracket(n, k, sigma1, sigma2, p, q),
        }
    }
}

/// `k(2-n) + n(k-1) + 2(n-σ)/(1+p)`, evaluated over a common denominator so
/// that it vanishes exactly at the threshold exponent.
pub fn scalar_bracket(n: f64, k: f64, sigma: f64, p: f64) -> f64 {
    // k(2-n) + n(k-1) = 2k - n
    ((2.0 * k - n) * (1.0 + p) + 2.0 * (n - sigma)) / (1.0 + p)
}

/// `k(2-n) + (n-σ₁)/(1+q) + (n-σ₂)/(1+p) + (k-1)n`.
pub fn system_bracket(n: f64, k: f64, sigma1: f64, sigma2: f64, p: f64, q: f64) -> f64 {
    let den = (1.0 + p) * (1.0 + q);
    ((2.0 * k - n) * den + (n - sigma1) * (1.0 + p) + (n - sigma2) * (1.0 + q)) / den
}

fn compare(value: f64, threshold: f64, larger_is_super: bool) -> CriticalityClass {
    let tol = EQ_RTOL * threshold.abs().max(1.0);
    if (value - threshold).abs() <= tol {
        CriticalityClass::Critical
    } else if (value > threshold) == larger_is_super {
        CriticalityClass::Supercritical
    } else {
        CriticalityClass::Subcritical
    }
}

pub fn classify_criticality(spec: &SystemSpec) -> CriticalityReport {
    let not_classifiable = |reason: String| CriticalityReport {
        class: CriticalityClass::NotClassifiable,
        threshold_value: f64::NAN,
        compared_value: f64::NAN,
        bracket: f64::NAN,
        rule: CriticalityRule::None,
        reason,
    };
    let validation = validate(spec);
    if !validation.is_ok() {
        return not_classifiable(format!("invalid system: {validation}"));
    }
    let Some(shape) = RecognizedShape::of(spec) else {
        return not_classifiable(
            "only the single-monomial scalar equation and the two-equation cross system \
             with equal orders are classified"
                .into(),
        );
    };
    let bracket = shape.bracket();
    match shape {
        RecognizedShape::Scalar { n, k, sigma, p } => {
            let threshold = (n + 2.0 * k - 2.0 * sigma) / (n - 2.0 * k);
            CriticalityReport {
                class: compare(p, threshold, true),
                threshold_value: threshold,
                compared_value: p,
                bracket,
                rule: CriticalityRule::ScalarExponent,
                reason: format!("p = {p} vs (n+2k-2σ)/(n-2k) = {threshold}"),
            }
        }
        RecognizedShape::Cross {
            n,
            k,
            q,
            sigma1,
            p,
            sigma2,
            ..
        } => {
            let lhs = (n - sigma1) / (1.0 + q) + (n - sigma2) / (1.0 + p);
            let rhs = n - 2.0 * k;
            CriticalityReport {
                class: compare(lhs, rhs, false),
                threshold_value: rhs,
                compared_value: lhs,
                bracket,
                rule: CriticalityRule::CrossSystem,
                reason: format!("(n-σ₁)/(1+q) + (n-σ₂)/(1+p) = {lhs} vs n-2k = {rhs}"),
            }
        }
    }
}
