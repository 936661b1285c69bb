//! Energy and Pohozaev identities on Navier-data trajectories.

mod common;

use common::*;
use polyshoot::analysis::{energy_identity, pohozaev_residual, pohozaev_with_stride};
use polyshoot::degree::{find_zero, SolveOptions};
use polyshoot::integrator::{integrate, IvpControls, Trajectory};
use polyshoot::system::{classify_criticality, CriticalityClass, SystemSpec};
use proptest::prelude::*;

/// Trajectory through the Navier point found on `Σα = a`.
fn navier_trajectory(spec: &SystemSpec, a: f64) -> Trajectory {
    let rs = reduced(spec);
    let z = find_zero(&rs, a, &SolveOptions::default()).expect("Navier point");
    let (traj, outcome) = integrate(&rs, &z.alpha_star, &IvpControls::default()).unwrap();
    assert!(outcome.is_wall_hit());
    traj
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn scalar_energy_is_consistent() {
    let spec = scalar(3, 1, 0.0, 2.0);
    let (traj, _) = integrate(&reduced(&spec), &[1.0], &IvpControls::default()).unwrap();
    let e = energy_identity(&traj, &spec).unwrap();
    assert_eq!(e.len(), 2);
    assert!(rel(e[0].value, e[1].value) < 1e-6);
    let report = pohozaev_residual(&traj, &spec).unwrap();
    assert!(report.navier_applicable);
    assert!(report.residual < 1e-4);
    assert!(report.boundary_flux > 0.0 && report.bracket > 0.0);
}

#[test]
fn biharmonic_energy_entries_agree() {
    let spec = scalar(5, 2, 0.0, 2.0);
    let traj = navier_trajectory(&spec, 2.0);
    let report = pohozaev_residual(&traj, &spec).unwrap();
    assert!(
        report.navier_applicable,
        "boundary max {}",
        report.boundary_max
    );
    let grads: Vec<f64> = report
        .energy_values
        .iter()
        .filter(|e| e.name.starts_with("grad"))
        .map(|e| e.value)
        .collect();
    assert_eq!(grads.len(), 2);
    assert!(rel(grads[0], grads[1]) < 1e-5);
    assert!(report.energy_spread < 1e-5);
    assert!(report.residual < 1e-4);
}

#[test]
fn lane_emden_sources_agree() {
    let spec = lane_emden(2.0, 2.0);
    let traj = navier_trajectory(&spec, 2.0);
    let report = pohozaev_residual(&traj, &spec).unwrap();
    let s1 = report
        .energy_values
        .iter()
        .find(|e| e.name == "source_1")
        .unwrap()
        .value;
    let s2 = report
        .energy_values
        .iter()
        .find(|e| e.name == "source_2")
        .unwrap()
        .value;
    assert!(rel(s1, s2) < 1e-5);
    assert!(report.residual < 1e-4);
    assert_eq!(report.extra_terms, 0.0);
}

#[test]
fn cross_terms_close_the_balance() {
    // u v² / r^{1/2} and 2 v u²: both s and t are positive
    let spec = cross(3, 1, 1.0, 2.0, 0.5, 1.0, 2.0, 0.0, 2.0);
    let traj = navier_trajectory(&spec, 2.0);
    let report = pohozaev_residual(&traj, &spec).unwrap();
    assert!(report.navier_applicable);
    assert!(report.extra_terms.abs() > 1e-3 * report.boundary_flux.abs());
    assert!(report.residual < 1e-6, "{}", report.residual);
}

#[test]
fn partial_data_is_flagged() {
    let spec = lane_emden(2.0, 2.0);
    let (traj, outcome) = integrate(&reduced(&spec), &[1.0, 0.5], &IvpControls::default()).unwrap();
    assert!(outcome.is_wall_hit());
    let report = pohozaev_with_stride(&traj, &spec, 1).unwrap();
    assert!(!report.navier_applicable);
}

#[test]
fn critical_brackets_vanish() {
    let report = pohozaev_with_stride(
        &integrate(
            &reduced(&scalar(3, 1, 0.0, 5.0)),
            &[1.0],
            &IvpControls::default(),
        )
        .unwrap()
        .0,
        &scalar(3, 1, 0.0, 5.0),
        1,
    )
    .unwrap();
    assert_eq!(report.bracket, 0.0);
    assert_eq!(classify_criticality(&lane_emden(5.0, 5.0)).bracket, 0.0);
}

#[test]
fn quadrature_refinement_reduces_the_residual() {
    let spec = scalar(3, 1, 0.0, 2.0);
    let coarse = IvpControls {
        dense_samples: 2,
        ..IvpControls::default()
    };
    let (traj, _) = integrate(&reduced(&spec), &[1.0], &coarse).unwrap();
    let r: Vec<f64> = [4, 2, 1]
        .iter()
        .map(|&s| pohozaev_with_stride(&traj, &spec, s).unwrap().residual)
        .collect();
    assert!(r[1] < 0.5 * r[0] && r[2] < 0.5 * r[1], "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wall_hit_flux_is_nonnegative(alpha in 0.05f64..20.0, p in 1.2f64..4.5) {
        let spec = scalar(3, 1, 0.0, p);
        let (traj, outcome) = integrate(&reduced(&spec), &[alpha], &IvpControls::default()).unwrap();
        prop_assert!(outcome.is_wall_hit());
        let report = pohozaev_with_stride(&traj, &spec, 1).unwrap();
        prop_assert!(report.boundary_flux >= 0.0);
        prop_assert!(report.residual < 1e-4);
        let class = classify_criticality(&spec).class;
        prop_assert_eq!(class, CriticalityClass::Subcritical);
        prop_assert!(report.bracket > 0.0);
    }
}
