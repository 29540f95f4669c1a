use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument failed validation before any computation.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("index ({battery}, {charger}) outside basis of shape ({battery_dim}, {charger_dim})")]
    IndexOutOfRange {
        battery: usize,
        charger: usize,
        battery_dim: usize,
        charger_dim: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not symmetric: |A[{row},{col}] - A[{col},{row}]| = {defect:e}")]
    NotHermitian { row: usize, col: usize, defect: f64 },

    #[error("eigendecomposition failed at dimension {dim}")]
    Eigensolver { dim: usize },

    #[error("Krylov propagation did not converge (dim {dim}, step {step:e}, error estimate {estimate:e})")]
    KrylovNonConvergence { dim: usize, step: f64, estimate: f64 },

    #[error("Fock cutoff did not converge after raising it to {cutoff} (relative change {change:e})")]
    CutoffNonConvergence { cutoff: usize, change: f64 },

    #[error("size bound exceeded: {what} ({value} > {limit})")]
    SizeBound {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("probabilities invalid: {0}")]
    Probability(String),

    #[error("fit is degenerate: {0}")]
    DegenerateFit(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eigensolver { .. }
                | Error::KrylovNonConvergence { .. }
                | Error::CutoffNonConvergence { .. }
        )
    }
}
