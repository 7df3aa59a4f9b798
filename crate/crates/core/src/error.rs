use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// Gamma-type function evaluated at a nonpositive integer.
    #[error("pole of the gamma function at x = {0}")]
    Pole(f64),

    /// An iterative series or eigenvalue solver did not converge.
    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
    },

    /// A polynomial recursion produced a value beyond the overflow guard.
    #[error("overflow: |value| exceeded {limit:e} at degree {degree}")]
    Overflow { degree: usize, limit: f64 },

    /// A requested size exceeds the configured cap.
    #[error("resource cap exceeded: {what} = {requested} > {cap}")]
    Resource {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// An integrand returned NaN or infinity at a quadrature node.
    #[error("non-finite integrand value at t = {0}")]
    NonFinite(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
