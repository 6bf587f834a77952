use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the formula.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// Adaptive quadrature ran out of subdivisions before meeting tolerance.
    #[error(
        "quadrature did not converge within {subdivisions} subdivisions (estimate {estimate}, error {error_estimate})"
    )]
    QuadratureNotConverged {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("series did not converge after {terms} terms (partial sum {partial})")]
    SeriesNotConverged { partial: f64, terms: usize },

    /// Two routes that must agree on the same quantity did not.
    #[error("cross-check failed for {what}: {left} vs {right}")]
    CrossCheck { what: &'static str, left: f64, right: f64 },

    #[error("simulation window holds {expected:.1} expected BSs, need at least {required}")]
    WindowTooSmall { expected: f64, required: u32 },

    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}
