use thiserror::Error;

/// Everything that can go wrong across the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller handed an operation input outside its precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Euler-angle extraction was requested too close to the pitch singularity.
    #[error("gimbal lock: |sin(theta)| = {sin_theta:.9} is within 1e-6 of 1")]
    GimbalLock { sin_theta: f64 },

    /// The ideal force collapsed to zero, so the commanded thrust axis is undefined.
    #[error("degenerate ideal force: |A| = {norm:e}")]
    DegenerateForce { norm: f64 },

    /// The desired heading is parallel to the commanded thrust axis.
    #[error("heading direction is parallel to the commanded thrust axis (|b1d x b3c| = {cross:e})")]
    HeadingAlignment { cross: f64 },

    /// A rotor spins too slowly for the advance ratios to be meaningful.
    #[error("rotor {rotor} stalled: omega = {omega} rad/s is at or below the {min} rad/s guard")]
    RotorStall { rotor: usize, omega: f64, min: f64 },

    /// The inflow iteration did not converge.
    #[error("inflow solver failed after {iterations} iterations (residual {residual:e})")]
    SolverDivergence { iterations: usize, residual: f64 },

    /// Invalid physical or scenario configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The plant produced a non-finite state.
    #[error("simulation aborted at step {step} (t = {time} s): {reason}")]
    SimulationAbort { step: usize, time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
