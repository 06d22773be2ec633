use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variants map onto the CLI exit-code contract: configuration-type errors
/// (`LengthMismatch`, `QuadratureTooCoarse`, `GridTooCoarse`, `InvalidInput`,
/// `DomainFile`) exit with 2, numerical failures with 3 and
/// `InsufficientStatistics` with 4.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("root finder did not converge after {iterations} iterations (worst scaled residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("sample length {got} does not match quadrature node count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate boundary: {0}")]
    DegenerateBoundary(String),

    #[error("exterior map inversion failed at z = {re}{im:+}i: {reason}")]
    MapInversionFailure { re: f64, im: f64, reason: String },

    #[error("boundary weight is not strictly positive (min {min:.3e} at node {node})")]
    WeightNotPositive { node: usize, min: f64 },

    #[error("quadrature with {nodes} nodes is too coarse, need at least {required}")]
    QuadratureTooCoarse { nodes: usize, required: usize },

    #[error("numerical breakdown at degree {degree}: normalization factor {norm:.3e}")]
    NumericalBreakdown { degree: usize, norm: f64 },

    #[error("grid spacing {spacing} exceeds the maximum {max}")]
    GridTooCoarse { spacing: f64, max: f64 },

    #[error("points too close to the diagonal (|det A| = {det:.3e})")]
    NearDiagonal { det: f64 },

    #[error("insufficient statistics: normalization bin {bin} has {count} counts (< {min})")]
    InsufficientStatistics { bin: usize, count: u64, min: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain file: key `{key}`: {message}")]
    DomainFile { key: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn map_inversion(z: num_complex::Complex64, reason: impl Into<String>) -> Self {
        Error::MapInversionFailure {
            re: z.re,
            im: z.im,
            reason: reason.into(),
        }
    }
}
