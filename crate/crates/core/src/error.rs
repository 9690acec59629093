use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Residuals are reported as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (|A - A*| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("eigenvalue pairing failed at pair {index}: gap {gap:e}")]
    PairingFailure { index: usize, gap: f64 },

    #[error("interlacing violated at level {level}, index {index} by {amount:e}")]
    Interlacing {
        level: usize,
        index: usize,
        amount: f64,
    },

    #[error("spectra of M_i*M_i and M_iM_i* differ at i = {index} by {gap:e}")]
    SpectrumMismatch { index: usize, gap: f64 },

    #[error("point outside the open ball (|y| = {norm})")]
    OutsideBall { norm: f64 },

    #[error("configuration is not stable: an atom carries weight {atom_weight} >= 1")]
    Unstable { atom_weight: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("weights are not admissible: 2 * {max} > {total}")]
    Inadmissible { max: f64, total: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("n = {n} exceeds the exhaustive signed-sum limit of {max}")]
    TooManySides { n: usize, max: usize },

    #[error("n = {n} is below the minimum of {min}")]
    TooFewSides { n: usize, min: usize },

    #[error("polygon is not generic at diagonal {diagonal}: {reason}")]
    NotGeneric { diagonal: usize, reason: String },

    #[error("rotation is not a proper rotation fixing the diagonal (residual {residual:e})")]
    BadRotation { residual: f64 },

    #[error("closure condition violated (residual {residual:e})")]
    ClosureViolation { residual: f64 },

    #[error("matrix is not in the image of the quaternionic embedding (residual {residual:e})")]
    NotQuaternionic { residual: f64 },

    #[error("rank deficient input (expected rank {expected})")]
    RankDeficient { expected: usize },

    #[error("zero homogeneous vector")]
    ZeroVector,
}

impl Error {
    /// Numerical non-convergence, as opposed to bad input or a violated invariant.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
