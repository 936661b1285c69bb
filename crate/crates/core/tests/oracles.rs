//! Integrations checked against closed forms and an independent fixed-step
//! integrator.

mod common;

use common::*;
use polyshoot::analysis::{decay_fit, AnalysisError};
use polyshoot::integrator::{integrate, IvpControls, Outcome, Trajectory};

/// First zero of `u'' + (2/r) u' + u^2 = 0`, `u(0) = α`, by classical RK4
/// in `r` with a fixed step, started from the two-term series.
fn rk4_first_zero(alpha: f64, h: f64) -> f64 {
    let f = |r: f64, y: [f64; 2]| [y[1], -2.0 / r * y[1] - y[0] * y[0]];
    let mut r = h;
    let mut y = [
        alpha - alpha * alpha * h * h / 6.0,
        -alpha * alpha * h / 3.0,
    ];
    loop {
        let k1 = f(r, y);
        let k2 = f(
            r + h / 2.0,
            [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]],
        );
        let k3 = f(
            r + h / 2.0,
            [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]],
        );
        let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if next[0] <= 0.0 {
            // cubic Hermite root on [r, r + h]
            let (u0, u1, d0, d1) = (y[0], next[0], y[1] * h, next[1] * h);
            let hermite = |s: f64| {
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * u0
                    + (s3 - 2.0 * s2 + s) * d0
                    + (-2.0 * s3 + 3.0 * s2) * u1
                    + (s3 - s2) * d1
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if hermite(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return r + h * 0.5 * (lo + hi);
        }
        y = next;
        r += h;
    }
}

#[test]
fn subcritical_wall_radius_matches_fixed_step_oracle() {
    let rs = reduced(&scalar(3, 1, 0.0, 2.0));
    for alpha in [0.5, 1.0, 3.0] {
        let (_, outcome) = integrate(&rs, &[alpha], &IvpControls::default()).unwrap();
        let Outcome::WallHit { r0, hit_index, .. } = outcome else {
            panic!("expected a wall hit, got {outcome:?}");
        };
        assert_eq!(hit_index, 0);
        let oracle = rk4_first_zero(alpha, 1e-4 / alpha.sqrt());
        assert!(
            (r0 - oracle).abs() < 1e-7 * oracle,
            "α = {alpha}: {r0} vs {oracle}"
        );
    }
}

#[test]
fn critical_bubble_family() {
    let rs = reduced(&scalar(3, 1, 0.0, 5.0));
    for mu in [0.5f64, 1.0, 2.0] {
        let alpha = 3f64.powf(0.25) * mu.sqrt();
        let (traj, outcome) = integrate(&rs, &[alpha], &IvpControls::default()).unwrap();
        assert!(outcome.is_decayed(), "{outcome:?}");
        let err = max_rel_error(&traj, 0, 50.0, |r| mu.sqrt() * bubble_n3(mu * r));
        assert!(err < 1e-6, "μ = {mu}: {err:e}");
    }
}

#[test]
fn weighted_critical_profile() {
    // -Δu = u³/r in R³ is solved by √2/(1 + r)
    let rs = reduced(&scalar(3, 1, 1.0, 3.0));
    let c = 2f64.sqrt();
    let (traj, outcome) = integrate(&rs, &[c], &IvpControls::default()).unwrap();
    assert!(outcome.is_decayed(), "{outcome:?}");
    let err = max_rel_error(&traj, 0, 50.0, |r| c / (1.0 + r));
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn biharmonic_chain_matches_both_levels() {
    let rs = reduced(&scalar(5, 2, 0.0, 9.0));
    let c = biharmonic_scale();
    let (traj, _) = integrate(&rs, &[c, 5.0 * c], &IvpControls::default()).unwrap();
    assert!(traj.r_end().unwrap() > 30.0);
    assert!(max_rel_error(&traj, 0, 30.0, |r| biharmonic_bubble(r).0) < 1e-5);
    assert!(max_rel_error(&traj, 1, 30.0, |r| biharmonic_bubble(r).1) < 1e-5);
}

#[test]
fn symmetric_lane_emden_reduces_to_the_scalar_bubble() {
    let rs = reduced(&lane_emden(5.0, 5.0));
    let a = 3f64.powf(0.25);
    let (traj, outcome) = integrate(&rs, &[a, a], &IvpControls::default()).unwrap();
    assert!(outcome.is_decayed());
    for m in 0..2 {
        assert!(max_rel_error(&traj, m, 50.0, bubble_n3) < 1e-6);
    }
}

#[test]
fn bubble_tails_decay_like_one_over_r() {
    let rs = reduced(&scalar(3, 1, 0.0, 5.0));
    let (traj, _) = integrate(&rs, &[3f64.powf(0.25)], &IvpControls::default()).unwrap();
    let fit = decay_fit(&traj, 0, 1e3, 1e5).unwrap();
    assert!((fit.fitted_rate + 1.0).abs() < 1e-4, "{fit:?}");
    assert!((fit.prefactor - 3f64.powf(0.25)).abs() < 1e-3);

    let rs = reduced(&scalar(5, 2, 0.0, 9.0));
    let c = biharmonic_scale();
    let (traj, _) = integrate(&rs, &[c, 5.0 * c], &IvpControls::default()).unwrap();
    let hi = traj.r_end().unwrap();
    let fit = decay_fit(&traj, 0, 50.0, hi.min(1e3)).unwrap();
    assert!((fit.fitted_rate + 1.0).abs() < 1e-2, "{fit:?}");
}

#[test]
fn degenerate_tails_are_rejected() {
    let flat = Trajectory {
        grid: vec![1.0, 2.0, 4.0, 8.0],
        values: vec![vec![1.0]; 4],
        derivs: vec![vec![0.0]; 4],
        alpha: vec![1.0],
    };
    assert!(matches!(
        decay_fit(&flat, 0, 1.0, 8.0),
        Err(AnalysisError::NonDecayingTail { .. })
    ));
    assert!(matches!(
        decay_fit(&flat, 0, 5.0, 7.0),
        Err(AnalysisError::WindowTooShort { .. })
    ));
}
