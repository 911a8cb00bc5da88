use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid `{param}`: {reason}")]
    Domain { param: &'static str, reason: String },

    #[error(
        "eigendecomposition of a {dim}x{dim} matrix did not converge \
         (frobenius norm {frobenius_norm:e}, hermitian defect {hermitian_defect:e})"
    )]
    NoConvergence {
        dim: usize,
        frobenius_norm: f64,
        hermitian_defect: f64,
    },

    /// The pseudospectrum had fewer local maxima than requested sources.
    #[error("resolution failure: expected {expected} peaks, found {}", found.len())]
    ResolutionFailure { expected: usize, found: Vec<f64> },

    /// An ESPRIT rotation eigenvalue maps outside the visible region.
    #[error("ESPRIT root {index} maps to sin(theta) = {sine:.6}, outside [-1, 1]")]
    AngleOutOfRange { index: usize, sine: f64 },

    #[error("degenerate signal subspace (smallest singular value {smallest_singular_value:e})")]
    DegenerateSubspace { smallest_singular_value: f64 },

    #[error("steering matrix is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },
}

impl Error {
    pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            param,
            reason: reason.into(),
        }
    }
}
