use thiserror::Error;

/// Errors produced by the solvers and simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("Nash verification failed for L* = {candidate}: {reason}")]
    NashVerification { candidate: f64, reason: String },

    #[error("ODE step rejected at t = {time}: r({k}) rose above r({k_prev}) by {excess:e}", k_prev = .k - 1)]
    StepRejected { time: f64, k: usize, excess: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last step {last_step:e})")]
    NonConverged { iterations: usize, last_step: f64 },

    #[error("coupling order violated at event {event} (t = {time}), level x = {level}: dominated system holds {lower} > {upper}")]
    CouplingViolation {
        event: u64,
        time: f64,
        level: u32,
        upper: u64,
        lower: u64,
    },

    #[error("density cannot be inverted: {0}")]
    DegenerateDensity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl Error {
    /// Whether the failure comes from a computation rather than its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NashVerification { .. }
                | Error::StepRejected { .. }
                | Error::NonConverged { .. }
                | Error::CouplingViolation { .. }
        )
    }
}
