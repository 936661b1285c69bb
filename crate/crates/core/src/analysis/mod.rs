//! Post-processing of radial trajectories: energy and Pohozaev identities on
//! balls, and tail fits for entire solutions.

mod decay;
mod pohozaev;
pub mod quadrature;

pub use decay::{decay_fit, DecayFit};
pub use pohozaev::{
    energy_identity, pohozaev_residual, pohozaev_with_stride, EnergyTerm, PohozaevReport,
    NAVIER_TOL,
};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("identity not applicable: {0}")]
    NotApplicable(String),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("fit window holds only {points} usable points")]
    WindowTooShort { points: usize },
    #[error("tail is not decaying (fitted rate {rate})")]
    NonDecayingTail { rate: f64 },
}
