use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A 2x2 matrix was required to be elliptic (|trace| < 2).
    #[error("matrix is not elliptic: |trace| = {trace}")]
    NotElliptic { trace: f64 },

    /// Input that is mathematically impossible but was produced by roundoff.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The energy is not strictly inside a band.
    #[error("energy {energy} is not in the interior of a band (discriminant {discriminant})")]
    NotInBandInterior { energy: f64, discriminant: f64 },

    /// The tridiagonal eigenvalue iteration did not converge.
    #[error("eigensolver failed to converge after {iterations} iterations (period {period})")]
    NoConvergence { period: usize, iterations: usize },

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An internal post-condition check failed.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// A bounded retry loop ran out of attempts.
    #[error("retry budget exhausted: {0}")]
    RetryExhausted(String),

    /// The minimax Lyapunov exponent of a family vanished.
    #[error("degenerate family: eta = {eta:e} at E = {energy}")]
    DegenerateFamily { eta: f64, energy: f64 },

    /// The requested repetition count is below the admissible threshold.
    #[error("N = {n} is too small; the minimum admissible N is {min}")]
    TooSmallN { n: usize, min: usize },

    /// Wraps an error with the pipeline stage that produced it.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Returns the innermost error, stripping stage annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
