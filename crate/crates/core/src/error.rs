use thiserror::Error;

use crate::itm::RootTrace;

/// Errors raised by the integrator, the scaling model, and the root finders.
///
/// Numeric payloads are widened to `f64` so the type stays independent of
/// the scalar the computation ran in.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("divergence: non-finite state at t = {t} (step {step})")]
    Divergence { t: f64, step: usize },

    #[error("unscalable endpoint: f'(eta_end) = {value} must be positive")]
    UnscalableEndpoint { value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("at h* = {h_star}: {source}")]
    AtHStar {
        h_star: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("bad bracket: no sign change on [{lo}, {hi}] (gamma = {f_lo}, {f_hi})")]
    BadBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("no convergence after {} evaluations", trace.iterations.len())]
    NoConvergence { trace: Box<RootTrace<f64>> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
