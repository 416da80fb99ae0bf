use thiserror::Error;

/// Errors produced by the spheremix library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative scheme (continued fraction, adaptive quadrature) failed
    /// to reach its tolerance within its iteration cap.
    #[error("failed to converge: {0}")]
    NonConvergence(String),

    /// A requested object would exceed a configured resource cap.
    #[error("resource cap exceeded: requested {requested}, cap {cap}")]
    ResourceCap { requested: usize, cap: usize },

    /// The sampled values of a function on a block do not bracket the
    /// requested average, so no mean-value point can be located.
    #[error("bracketing failure: target {target} outside sampled range [{min}, {max}]")]
    Bracketing { target: f64, min: f64, max: f64 },

    /// A target function does not integrate to 1 within tolerance.
    #[error("not a probability density: sphere integral {integral} (tolerance {tolerance})")]
    NonDensity { integral: f64, tolerance: f64 },

    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
