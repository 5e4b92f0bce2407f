//! Riemann problems closed by kinetic relations.

pub mod entropy;
pub mod hugoniot;
pub mod kinetic;
pub mod mp_euler;
pub mod standing;
pub mod system;

use thiserror::Error;

use crate::endstate::EndStateError;
use crate::eos::EosError;
use crate::roots::RootError;

/// Default threshold on `|1 - u²/c²|` below which data count as resonant.
pub const RESONANCE_DELTA: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiemannError {
    #[error("resonance_guard: |1 - u^2/c^2| = {value:e} on the {side} state is below {delta:e}")]
    Resonance { side: &'static str, value: f64, delta: f64 },
    #[error("vacuum_formation: star pressure would fall below {floor:e}")]
    Vacuum { floor: f64 },
    #[error("no_convergence: {0}")]
    NoConvergence(String),
    #[error("no_root_on_branch: {0}")]
    NoRootOnBranch(String),
    #[error("invalid_input: {0}")]
    Invalid(String),
    #[error(transparent)]
    EndState(#[from] EndStateError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Eos(#[from] EosError),
}

impl RiemannError {
    /// Short machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            RiemannError::Resonance { .. } => "resonance_guard",
            RiemannError::Vacuum { .. } => "vacuum_formation",
            RiemannError::NoConvergence(_) => "no_convergence",
            RiemannError::NoRootOnBranch(_) => "no_root_on_branch",
            RiemannError::Invalid(_) => "invalid_input",
            RiemannError::EndState(e) => e.code(),
            RiemannError::Root(e) => e.code(),
            RiemannError::Eos(e) => e.code(),
        }
    }
}
