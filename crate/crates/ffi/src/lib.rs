//! C ABI for the polyshoot solver.
//!
//! Systems and trajectories are opaque handles created and released through
//! this interface. Every fallible call returns a [`PsStatus`]; on failure the
//! message is kept per thread and can be copied out with
//! [`ps_last_error_message`]. Panics never cross the boundary.

use polyshoot::degree::{find_zero, DegreeError, SolveOptions};
use polyshoot::integrator::{shoot, IntegrationError, IvpControls, Outcome, Trajectory};
use polyshoot::system::{
    classify_criticality, parse_spec, reduce, CriticalityClass, ReducedSystem, SystemSpec,
};
use polyshoot::target::{psi, TargetCase};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NotFound = 3,
    IntegrationFailed = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsOutcome {
    WallHit = 0,
    Decayed = 1,
    Truncated = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsTargetCase {
    Boundary = 0,
    WallHit = 1,
    Decay = 2,
    Unresolved = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsCriticality {
    Subcritical = 0,
    Critical = 1,
    Supercritical = 2,
    NotClassifiable = 3,
}

/// Integrator controls; see `ps_controls_default` for the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsControls {
    pub h0: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub r_max: f64,
    pub eps_wall: f64,
    pub eps_decay: f64,
    pub max_steps: u64,
    pub dense_samples: u64,
    pub max_log_step: f64,
}

impl From<&IvpControls> for PsControls {
    fn from(c: &IvpControls) -> Self {
        Self {
            h0: c.h0,
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            r_max: c.r_max,
            eps_wall: c.eps_wall,
            eps_decay: c.eps_decay,
            max_steps: c.max_steps as u64,
            dense_samples: c.dense_samples as u64,
            max_log_step: c.max_log_step,
        }
    }
}

impl From<&PsControls> for IvpControls {
    fn from(c: &PsControls) -> Self {
        Self {
            h0: c.h0,
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            r_max: c.r_max,
            eps_wall: c.eps_wall,
            eps_decay: c.eps_decay,
            max_steps: usize::try_from(c.max_steps).unwrap_or(usize::MAX),
            dense_samples: usize::try_from(c.dense_samples).unwrap_or(usize::MAX),
            max_log_step: c.max_log_step,
        }
    }
}

/// A validated system with its reduced chain form.
pub struct PsSystem {
    spec: SystemSpec,
    reduced: ReducedSystem,
}

/// A recorded integration with its terminal classification.
pub struct PsTrajectory {
    trajectory: Trajectory,
    outcome: Outcome,
}

struct Failure(PsStatus, String);

impl From<IntegrationError> for Failure {
    fn from(e: IntegrationError) -> Self {
        let status = match e {
            IntegrationError::StepLimitExceeded { .. }
            | IntegrationError::StiffnessFailure { .. } => PsStatus::IntegrationFailed,
            _ => PsStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<DegreeError> for Failure {
    fn from(e: DegreeError) -> Self {
        let status = match e {
            DegreeError::NotFound { .. }
            | DegreeError::AllUnresolved
            | DegreeError::InconsistentBoundary { .. } => PsStatus::NotFound,
            DegreeError::Integration(e) => return e.into(),
            _ => PsStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PsStatus::Panic
        }
    }
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn controls_or_default(c: *const PsControls) -> IvpControls {
    c.as_ref()
        .map_or_else(IvpControls::default, IvpControls::from)
}

/// Default integrator controls.
#[no_mangle]
pub extern "C" fn ps_controls_default() -> PsControls {
    PsControls::from(&IvpControls::default())
}

/// Parses and validates a TOML system description. On success `*out` owns a
/// new handle, to be released with `ps_system_free`.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_system_from_toml(
    toml: *const c_char,
    out: *mut *mut PsSystem,
) -> PsStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|e| Failure(PsStatus::InvalidInput, e.to_string()))?;
        let spec = parse_spec(text).map_err(|e| Failure(PsStatus::InvalidInput, e.to_string()))?;
        let reduced = reduce(&spec).map_err(|e| Failure(PsStatus::InvalidInput, e.to_string()))?;
        *out = Box::into_raw(Box::new(PsSystem { spec, reduced }));
        Ok(())
    })
}

/// Releases a system handle. Null is ignored.
///
/// # Safety
/// `system` must come from `ps_system_from_toml` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ps_system_free(system: *mut PsSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of chain components, i.e. the length of every shooting vector.
/// Returns 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_system_reduced_len(system: *const PsSystem) -> usize {
    system.as_ref().map_or(0, |s| s.reduced.total_len())
}

/// Criticality class and Pohozaev bracket. Either output may be null.
///
/// # Safety
/// `system` must be a live handle; outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn ps_classify(
    system: *const PsSystem,
    class_out: *mut PsCriticality,
    bracket_out: *mut f64,
) -> PsStatus {
    guard(|| {
        let sys = system.as_ref().ok_or_else(|| null("system"))?;
        let report = classify_criticality(&sys.spec);
        if let Some(c) = class_out.as_mut() {
            *c = match report.class {
                CriticalityClass::Subcritical => PsCriticality::Subcritical,
                CriticalityClass::Critical => PsCriticality::Critical,
                CriticalityClass::Supercritical => PsCriticality::Supercritical,
                CriticalityClass::NotClassifiable => PsCriticality::NotClassifiable,
            };
        }
        if let Some(b) = bracket_out.as_mut() {
            *b = report.bracket;
        }
        Ok(())
    })
}

/// Integrates from `alpha` (all entries positive). `controls` may be null
/// for the defaults. On success `*out` owns a trajectory handle.
///
/// # Safety
/// `alpha` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_shoot(
    system: *const PsSystem,
    alpha: *const f64,
    len: usize,
    controls: *const PsControls,
    out: *mut *mut PsTrajectory,
) -> PsStatus {
    guard(|| {
        let sys = system.as_ref().ok_or_else(|| null("system"))?;
        let alpha = slice(alpha, len, "alpha")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let run = shoot(&sys.reduced, alpha, &controls_or_default(controls), true)?;
        *out = Box::into_raw(Box::new(PsTrajectory {
            trajectory: run.trajectory,
            outcome: run.outcome,
        }));
        Ok(())
    })
}

/// Evaluates the target map at `alpha` (entries may be zero). Writes `len`
/// values to `psi_out` and the case to `case_out` (may be null).
///
/// # Safety
/// `alpha` and `psi_out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_psi(
    system: *const PsSystem,
    alpha: *const f64,
    len: usize,
    controls: *const PsControls,
    psi_out: *mut f64,
    case_out: *mut PsTargetCase,
) -> PsStatus {
    guard(|| {
        let sys = system.as_ref().ok_or_else(|| null("system"))?;
        let alpha = slice(alpha, len, "alpha")?;
        if psi_out.is_null() {
            return Err(null("psi_out"));
        }
        let t = psi(&sys.reduced, alpha, &controls_or_default(controls))?;
        ptr::copy_nonoverlapping(t.psi.as_ptr(), psi_out, t.psi.len());
        if let Some(c) = case_out.as_mut() {
            *c = match t.case {
                TargetCase::BoundaryIdentity => PsTargetCase::Boundary,
                TargetCase::WallHit => PsTargetCase::WallHit,
                TargetCase::DecayLimit => PsTargetCase::Decay,
                TargetCase::Unresolved => PsTargetCase::Unresolved,
            };
        }
        Ok(())
    })
}

/// Searches `Σα = mass` for a zero of the target map. Writes α★ (`len`
/// doubles, equal to the reduced length) and `‖ψ(α★)‖∞`. Returns
/// `NotFound` when the search ends without a zero.
///
/// # Safety
/// `alpha_out` must hold `len` doubles; `psi_norm_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn ps_find_zero(
    system: *const PsSystem,
    mass: f64,
    controls: *const PsControls,
    depth: u32,
    budget: u32,
    alpha_out: *mut f64,
    len: usize,
    psi_norm_out: *mut f64,
) -> PsStatus {
    guard(|| {
        let sys = system.as_ref().ok_or_else(|| null("system"))?;
        if alpha_out.is_null() {
            return Err(null("alpha_out"));
        }
        let want = sys.reduced.total_len();
        if len < want {
            return Err(Failure(
                PsStatus::BufferTooSmall,
                format!("alpha_out holds {len} values, {want} needed"),
            ));
        }
        let opts = SolveOptions {
            controls: controls_or_default(controls),
            depth,
            budget,
            jobs: Some(1),
        };
        let z = find_zero(&sys.reduced, mass, &opts)?;
        ptr::copy_nonoverlapping(z.alpha_star.as_ptr(), alpha_out, want);
        if let Some(n) = psi_norm_out.as_mut() {
            *n = z.target.psi_norm();
        }
        Ok(())
    })
}

/// Releases a trajectory handle. Null is ignored.
///
/// # Safety
/// `traj` must come from `ps_shoot` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_free(traj: *mut PsTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of recorded radii (0 for null).
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_len(traj: *const PsTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.trajectory.len())
}

/// Number of components per sample (0 for null).
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_components(traj: *const PsTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.trajectory.num_components())
}

unsafe fn copy_column(
    traj: *const PsTrajectory,
    out: *mut f64,
    cap: usize,
    column: impl FnOnce(&Trajectory) -> Result<Vec<f64>, Failure>,
) -> PsStatus {
    guard(|| {
        let t = traj.as_ref().ok_or_else(|| null("trajectory"))?;
        let col = column(&t.trajectory)?;
        if cap < col.len() {
            return Err(Failure(
                PsStatus::BufferTooSmall,
                format!("buffer holds {cap} values, {} needed", col.len()),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(col.as_ptr(), out, col.len());
        Ok(())
    })
}

fn component_index(t: &Trajectory, m: usize) -> Result<(), Failure> {
    if m < t.num_components() {
        Ok(())
    } else {
        Err(Failure(
            PsStatus::InvalidInput,
            format!(
                "component {m} out of range ({} components)",
                t.num_components()
            ),
        ))
    }
}

/// Copies the radii into `out` (capacity `cap`).
///
/// # Safety
/// `out` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_radii(
    traj: *const PsTrajectory,
    out: *mut f64,
    cap: usize,
) -> PsStatus {
    copy_column(traj, out, cap, |t| Ok(t.grid.clone()))
}

/// Copies component `m` (0-based) into `out`.
///
/// # Safety
/// `out` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_values(
    traj: *const PsTrajectory,
    m: usize,
    out: *mut f64,
    cap: usize,
) -> PsStatus {
    copy_column(traj, out, cap, |t| {
        component_index(t, m)?;
        Ok(t.component(m))
    })
}

/// Copies the radial derivative of component `m` into `out`.
///
/// # Safety
/// `out` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_derivatives(
    traj: *const PsTrajectory,
    m: usize,
    out: *mut f64,
    cap: usize,
) -> PsStatus {
    copy_column(traj, out, cap, |t| {
        component_index(t, m)?;
        Ok(t.derivative(m))
    })
}

/// Terminal classification: kind, terminal radius and, for a wall hit, the
/// component that reached zero. Outputs may be null.
///
/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_trajectory_outcome(
    traj: *const PsTrajectory,
    kind_out: *mut PsOutcome,
    radius_out: *mut f64,
    hit_index_out: *mut usize,
) -> PsStatus {
    guard(|| {
        let t = traj.as_ref().ok_or_else(|| null("trajectory"))?;
        let (kind, hit) = match t.outcome {
            Outcome::WallHit { hit_index, .. } => (PsOutcome::WallHit, hit_index),
            Outcome::Decayed { .. } => (PsOutcome::Decayed, usize::MAX),
            Outcome::Truncated { .. } => (PsOutcome::Truncated, usize::MAX),
        };
        if let Some(k) = kind_out.as_mut() {
            *k = kind;
        }
        if let Some(r) = radius_out.as_mut() {
            *r = t.outcome.terminal_radius();
        }
        if let Some(h) = hit_index_out.as_mut() {
            *h = hit;
        }
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` as a
/// NUL-terminated string, truncated to `cap` bytes. Returns the full
/// message length excluding the terminator; pass `cap = 0` to query it.
///
/// # Safety
/// `buf` must hold `cap` bytes (may be null when `cap` is 0).
#[no_mangle]
pub unsafe extern "C" fn ps_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if cap > 0 && !buf.is_null() {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
