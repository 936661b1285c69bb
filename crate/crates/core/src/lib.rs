//! Radial shooting for weighted polyharmonic systems
//! `(-Δ)^{k_i} u_i = f_i(|x|, u)` on `R^n`.
//!
//! * [`system`]: specs, reduction to second-order chains, criticality and
//!   non-degeneracy checks;
//! * [`integrator`]: the singular radial initial value problem;
//! * [`target`]: the target map `ψ` and the simplex charts;
//! * [`degree`]: labeled subdivisions of the mass simplex and the zero search;
//! * [`analysis`]: energy and Pohozaev identities, tail fits;
//! * [`cli`]: the `polyshoot` command line.

// `!(x > 0.0)` rejects NaN along with the bad range; stage loops index
// several arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod cli;
pub mod degree;
pub mod integrator;
pub mod system;
pub mod target;

/// Any error surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Spec(#[from] system::SpecError),
    #[error(transparent)]
    Integration(#[from] integrator::IntegrationError),
    #[error(transparent)]
    Trajectory(#[from] integrator::TrajectoryIoError),
    #[error(transparent)]
    Target(#[from] target::TargetError),
    #[error(transparent)]
    Degree(#[from] degree::DegreeError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
