use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("invalid trace {0}")]
    InvalidTrace(f64),

    #[error("state is not normalized (trace {0})")]
    NotNormalized(f64),

    #[error("vector is not normalized (norm {0})")]
    NotUnitVector(f64),

    #[error("operator is not a projector (deviation {0:.3e})")]
    NotProjector(f64),

    #[error("operator lies outside [0, I] (eigenvalue {0:.3e})")]
    OutsideUnitInterval(f64),

    #[error("POVM is incomplete (residual {0:.3e})")]
    PovmIncomplete(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("decoding bound not met after {attempts} permutations (best seed {best_seed}, error {best_error:.6} > bound {bound:.6})")]
    RetryExhausted {
        attempts: usize,
        best_seed: u64,
        best_error: f64,
        bound: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
