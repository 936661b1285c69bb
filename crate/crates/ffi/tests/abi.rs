//! The exported functions, called through their C signatures.

use polyshoot_ffi::*;
use std::ffi::{c_char, CString};
use std::ptr;

const LANE_EMDEN: &str = "n = 3
[[equations]]
order = 1
[[equations.monomials]]
coef = 1.0
sigma = 0.0
powers = [0.0, 5.0]
[[equations]]
order = 1
[[equations.monomials]]
coef = 1.0
sigma = 0.0
powers = [5.0, 0.0]
";

fn system(text: &str) -> *mut PsSystem {
    let text = CString::new(text).unwrap();
    let mut sys = ptr::null_mut();
    let status = unsafe { ps_system_from_toml(text.as_ptr(), &mut sys) };
    assert_eq!(status, PsStatus::Ok);
    sys
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { ps_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn shoot_and_read_back() {
    let sys = system(&LANE_EMDEN.replace("5.0", "2.0"));
    assert_eq!(unsafe { ps_system_reduced_len(sys) }, 2);
    let mut traj = ptr::null_mut();
    let alpha = [1.0, 1.0];
    let status = unsafe { ps_shoot(sys, alpha.as_ptr(), 2, ptr::null(), &mut traj) };
    assert_eq!(status, PsStatus::Ok);

    let (mut kind, mut r0, mut hit) = (PsOutcome::Truncated, 0.0, 0usize);
    assert_eq!(
        unsafe { ps_trajectory_outcome(traj, &mut kind, &mut r0, &mut hit) },
        PsStatus::Ok
    );
    assert_eq!(kind, PsOutcome::WallHit);
    assert!(r0 > 1.0);

    let len = unsafe { ps_trajectory_len(traj) };
    assert_eq!(unsafe { ps_trajectory_components(traj) }, 2);
    let mut radii = vec![0.0; len];
    let mut w = vec![0.0; len];
    let mut dw = vec![0.0; len];
    unsafe {
        assert_eq!(
            ps_trajectory_radii(traj, radii.as_mut_ptr(), len),
            PsStatus::Ok
        );
        assert_eq!(
            ps_trajectory_values(traj, 0, w.as_mut_ptr(), len),
            PsStatus::Ok
        );
        assert_eq!(
            ps_trajectory_derivatives(traj, 0, dw.as_mut_ptr(), len),
            PsStatus::Ok
        );
    }
    assert_eq!(*radii.last().unwrap(), r0);
    assert!(radii.windows(2).all(|p| p[0] < p[1]));
    assert!(dw.iter().all(|&d| d <= 0.0));

    assert_eq!(
        unsafe { ps_trajectory_radii(traj, radii.as_mut_ptr(), len - 1) },
        PsStatus::BufferTooSmall
    );
    assert_eq!(
        unsafe { ps_trajectory_values(traj, 2, w.as_mut_ptr(), len) },
        PsStatus::InvalidInput
    );
    assert!(last_error().contains("out of range"));
    unsafe {
        ps_trajectory_free(traj);
        ps_system_free(sys);
    }
}

#[test]
fn invalid_inputs_report_errors() {
    let bad = CString::new("n = 2\n").unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(
        unsafe { ps_system_from_toml(bad.as_ptr(), &mut sys) },
        PsStatus::InvalidInput
    );
    assert!(sys.is_null());
    assert!(last_error().contains("equations"));
    assert_eq!(
        unsafe { ps_system_from_toml(ptr::null(), &mut sys) },
        PsStatus::NullPointer
    );

    let sys = system(LANE_EMDEN);
    let mut traj = ptr::null_mut();
    let alpha = [1.0, -1.0];
    assert_eq!(
        unsafe { ps_shoot(sys, alpha.as_ptr(), 2, ptr::null(), &mut traj) },
        PsStatus::InvalidInput
    );
    assert_eq!(
        unsafe { ps_shoot(sys, alpha.as_ptr(), 1, ptr::null(), &mut traj) },
        PsStatus::InvalidInput
    );
    let mut c = ps_controls_default();
    c.rel_tol = -1.0;
    let alpha = [1.0, 1.0];
    assert_eq!(
        unsafe { ps_shoot(sys, alpha.as_ptr(), 2, &c, &mut traj) },
        PsStatus::InvalidInput
    );
    assert!(last_error().contains("tolerances"));
    // a required length query
    assert!(unsafe { ps_last_error_message(ptr::null_mut(), 0) } > 0);
    unsafe { ps_system_free(sys) };
}

#[test]
fn target_map_and_classification() {
    let sys = system(LANE_EMDEN);
    let (mut class, mut bracket) = (PsCriticality::NotClassifiable, 1.0);
    assert_eq!(
        unsafe { ps_classify(sys, &mut class, &mut bracket) },
        PsStatus::Ok
    );
    assert_eq!(class, PsCriticality::Critical);
    assert_eq!(bracket, 0.0);

    let mut out = [9.0; 2];
    let mut case = PsTargetCase::Unresolved;
    let alpha = [0.0, 1.5];
    let status = unsafe {
        ps_psi(
            sys,
            alpha.as_ptr(),
            2,
            ptr::null(),
            out.as_mut_ptr(),
            &mut case,
        )
    };
    assert_eq!(status, PsStatus::Ok);
    assert_eq!(case, PsTargetCase::Boundary);
    assert_eq!(out, alpha);
    unsafe { ps_system_free(sys) };
}

#[test]
fn find_zero_recovers_symmetric_point() {
    let sys = system(LANE_EMDEN);
    let a = 2.0 * 3f64.powf(0.25);
    let mut alpha = [0.0; 2];
    let mut norm = 1.0;
    let status =
        unsafe { ps_find_zero(sys, a, ptr::null(), 3, 60, alpha.as_mut_ptr(), 2, &mut norm) };
    assert_eq!(status, PsStatus::Ok);
    assert!((alpha[0] - 3f64.powf(0.25)).abs() < 1e-2);
    assert!(norm < 1e-6);

    let status = unsafe {
        ps_find_zero(
            sys,
            -1.0,
            ptr::null(),
            3,
            60,
            alpha.as_mut_ptr(),
            2,
            &mut norm,
        )
    };
    assert_eq!(status, PsStatus::InvalidInput);
    let status =
        unsafe { ps_find_zero(sys, a, ptr::null(), 3, 60, alpha.as_mut_ptr(), 1, &mut norm) };
    assert_eq!(status, PsStatus::BufferTooSmall);
    unsafe { ps_system_free(sys) };

    // subcritical: the search ends on Navier data or reports no zero
    let sub = system(&LANE_EMDEN.replace("5.0", "2.0"));
    let status = unsafe {
        ps_find_zero(
            sub,
            2.0,
            ptr::null(),
            3,
            10,
            alpha.as_mut_ptr(),
            2,
            &mut norm,
        )
    };
    assert!(
        matches!(status, PsStatus::Ok | PsStatus::NotFound),
        "{status:?}"
    );
    unsafe { ps_system_free(sub) };
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        ps_system_free(ptr::null_mut());
        ps_trajectory_free(ptr::null_mut());
        assert_eq!(ps_system_reduced_len(ptr::null()), 0);
        assert_eq!(ps_trajectory_len(ptr::null()), 0);
        assert_eq!(
            ps_classify(ptr::null(), ptr::null_mut(), ptr::null_mut()),
            PsStatus::NullPointer
        );
    }
}
