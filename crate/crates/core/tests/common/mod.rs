#![allow(dead_code)]

use polyshoot::integrator::Trajectory;
use polyshoot::system::{reduce, EquationSpec, Monomial, ReducedSystem, SystemSpec};

/// `(-Δ)^k u = coef · u^p / r^σ` in `R^n`.
pub fn scalar(n: u32, k: u32, sigma: f64, p: f64) -> SystemSpec {
    SystemSpec {
        n,
        equations: vec![EquationSpec {
            order: k,
            monomials: vec![Monomial::new(1.0, sigma, vec![p])],
        }],
    }
}

/// `(-Δ)^k u = u^s v^q / r^{σ₁}`, `(-Δ)^k v = c₂ v^t u^p / r^{σ₂}`.
#[allow(clippy::too_many_arguments)]
pub fn cross(
    n: u32,
    k: u32,
    s: f64,
    q: f64,
    sigma1: f64,
    t: f64,
    p: f64,
    sigma2: f64,
    c2: f64,
) -> SystemSpec {
    SystemSpec {
        n,
        equations: vec![
            EquationSpec {
                order: k,
                monomials: vec![Monomial::new(1.0, sigma1, vec![s, q])],
            },
            EquationSpec {
                order: k,
                monomials: vec![Monomial::new(c2, sigma2, vec![p, t])],
            },
        ],
    }
}

pub fn lane_emden(p: f64, q: f64) -> SystemSpec {
    cross(3, 1, 0.0, q, 0.0, 0.0, p, 0.0, 1.0)
}

pub fn reduced(spec: &SystemSpec) -> ReducedSystem {
    reduce(spec).expect("valid spec")
}

/// Largest relative error of component `m` against `exact` on grid points
/// with `r <= r_hi`.
pub fn max_rel_error(traj: &Trajectory, m: usize, r_hi: f64, exact: impl Fn(f64) -> f64) -> f64 {
    traj.grid
        .iter()
        .zip(&traj.values)
        .filter(|(r, _)| **r <= r_hi)
        .map(|(&r, w)| ((w[m] - exact(r)) / exact(r)).abs())
        .fold(0.0, f64::max)
}

pub fn bubble_n3(r: f64) -> f64 {
    3f64.powf(0.25) / (1.0 + r * r).sqrt()
}

pub fn biharmonic_scale() -> f64 {
    105f64.powf(0.125)
}

/// `c (1 + r²)^{-1/2}` in `R^5` and its negative Laplacian.
pub fn biharmonic_bubble(r: f64) -> (f64, f64) {
    let c = biharmonic_scale();
    let s = 1.0 + r * r;
    (c / s.sqrt(), c * (5.0 + 2.0 * r * r) / s.powf(2.5))
}
