//! Randomized invariants of the integrator, the target map and the solver.

mod common;

use common::*;
use polyshoot::degree::{compute_degree, find_zero, SimplexGrid, SolveOptions};
use polyshoot::integrator::{shoot, IvpControls, Outcome};
use polyshoot::system::{
    classify_criticality, reduce, scalar_bracket, CriticalityClass, EquationSpec, Monomial,
    SystemSpec,
};
use polyshoot::target::{psi, TargetCase};
use proptest::prelude::*;

fn monomial(len: usize) -> impl Strategy<Value = Monomial> {
    (
        0.2f64..3.0,
        -1.0f64..1.5,
        proptest::collection::vec(prop_oneof![Just(0.0), 0.3f64..4.0], len),
    )
        .prop_map(|(c, s, p)| Monomial::new(c, s, p))
}

/// Valid specs with one or two unknowns in dimensions 3 to 8.
fn any_spec() -> impl Strategy<Value = SystemSpec> {
    (3u32..=8, 1usize..=2).prop_flat_map(|(n, len)| {
        let kmax = (n - 1) / 2;
        let eq = (1..=kmax, proptest::collection::vec(monomial(len), 1..=2))
            .prop_map(|(order, monomials)| EquationSpec { order, monomials });
        proptest::collection::vec(eq, len).prop_map(move |equations| SystemSpec { n, equations })
    })
}

fn spec_and_alpha() -> impl Strategy<Value = (SystemSpec, Vec<f64>)> {
    any_spec().prop_flat_map(|spec| {
        let len = spec.reduced_len();
        (Just(spec), proptest::collection::vec(0.1f64..5.0, len))
    })
}

fn bounded() -> IvpControls {
    IvpControls {
        r_max: 1e8,
        max_steps: 200_000,
        ..IvpControls::default()
    }
}

fn r0_of(p: f64, alpha: f64) -> f64 {
    let rs = reduced(&scalar(3, 1, 0.0, p));
    match shoot(&rs, &[alpha], &IvpControls::default(), false)
        .unwrap()
        .outcome
    {
        Outcome::WallHit { r0, .. } => r0,
        other => panic!("expected a wall hit, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn components_never_increase((spec, alpha) in spec_and_alpha()) {
        let rs = reduce(&spec).unwrap();
        let run = shoot(&rs, &alpha, &bounded(), true).unwrap();
        prop_assert!(run.stats.max_positive_slope <= 1e-12, "{}", run.stats.max_positive_slope);
        for (w, d) in run.trajectory.values.iter().zip(&run.trajectory.derivs) {
            if w.iter().all(|&x| x > 0.0) {
                prop_assert!(d.iter().all(|&x| x <= 1e-12));
            }
        }
    }

    #[test]
    fn target_never_gains_mass((spec, alpha) in spec_and_alpha()) {
        let rs = reduce(&spec).unwrap();
        let t = psi(&rs, &alpha, &bounded()).unwrap();
        prop_assert!(t.psi.iter().all(|&x| x >= 0.0));
        prop_assert!(t.psi.iter().sum::<f64>() <= alpha.iter().sum::<f64>());
        for (p, a) in t.psi.iter().zip(&alpha) {
            prop_assert!(p <= a);
        }
    }

    #[test]
    fn wall_radius_scales(p in 1.5f64..4.0, alpha in 0.2f64..3.0, lambda in 0.5f64..3.0) {
        // u_λ(x) = λ^{2/(p-1)} u(λx)
        let scaled = alpha * lambda.powf(2.0 / (p - 1.0));
        let (r, rs) = (r0_of(p, alpha), r0_of(p, scaled));
        prop_assert!((rs * lambda - r).abs() < 1e-6 * r, "{} vs {}", rs * lambda, r);
    }

    #[test]
    fn class_matches_bracket_sign(n in 3u32..=12, k in 1u32..=5, sigma in -2.0f64..1.99, p in 0.5f64..12.0) {
        prop_assume!(2 * k < n);
        let spec = scalar(n, k, sigma, p);
        let report = classify_criticality(&spec);
        let b = scalar_bracket(f64::from(n), f64::from(k), sigma, p);
        prop_assert_eq!(report.class.admits_entire_solution(), b <= 0.0);
        prop_assert_eq!(report.class == CriticalityClass::Subcritical, b > 0.0);
    }
}

#[test]
fn boundary_points_are_fixed_exactly() {
    let rs = reduced(&lane_emden(5.0, 5.0));
    for alpha in [[0.0, 2.5], [1e-300, 0.0], [0.0, 0.0]] {
        let t = psi(&rs, &alpha, &IvpControls::default()).unwrap();
        assert_eq!(t.case, TargetCase::BoundaryIdentity);
        assert_eq!(t.psi, alpha.to_vec());
    }
}

#[test]
fn degree_survives_subdivision() {
    let rs = reduced(&lane_emden(5.0, 5.0));
    let a = 2.0 * 3f64.powf(0.25);
    let c = IvpControls::default();
    let d3 = compute_degree(&SimplexGrid::from_target_map(&rs, a, 3, &c, None).unwrap()).unwrap();
    let d4 = compute_degree(&SimplexGrid::from_target_map(&rs, a, 4, &c, None).unwrap()).unwrap();
    assert_eq!(d3.unresolved_vertices, 0);
    assert_eq!(d3.degree, d4.degree);
}

#[test]
fn four_component_degree_is_one() {
    // (-Δ)² u = v², (-Δ)² v = u³ in R^7
    let spec = cross(7, 2, 0.0, 2.0, 0.0, 0.0, 3.0, 0.0, 1.0);
    let rs = reduced(&spec);
    let grid = SimplexGrid::from_target_map(&rs, 4.0, 2, &IvpControls::default(), Some(2)).unwrap();
    assert_eq!(compute_degree(&grid).unwrap().degree, 1);
}

#[test]
fn search_is_deterministic_across_thread_counts() {
    let spec = cross(7, 2, 0.0, 2.0, 0.0, 0.0, 3.0, 0.0, 1.0);
    let rs = reduced(&spec);
    let run = |jobs| {
        let opts = SolveOptions {
            jobs: Some(jobs),
            budget: 30,
            ..SolveOptions::default()
        };
        serde_json::to_string(&find_zero(&rs, 4.0, &opts).unwrap()).unwrap()
    };
    assert_eq!(run(1), run(4));
}
