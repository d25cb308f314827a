use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("no interior stationary point after {iterations} iterations (best value {best_value}, gradient norm {grad_norm:e})")]
    ConvergenceFailure {
        iterations: usize,
        best: Vec<f64>,
        best_value: f64,
        grad_norm: f64,
    },

    #[error("quadrature accuracy {err_estimate:e} exceeds tolerance {tolerance:e} (fine {fine}, coarse {coarse})")]
    AccuracyFailure {
        fine: f64,
        coarse: f64,
        err_estimate: f64,
        tolerance: f64,
    },

    #[error("integrand not negligible on the boundary of the integration box after {doublings} doublings")]
    Truncation { doublings: usize },

    #[error("curvature failure: negative log posterior Hessian is not positive definite at the mode ({0})")]
    CurvatureFailure(String),

    #[error("importance weights degenerate: effective sample size {ess:.2} of {samples} draws")]
    Degeneracy { ess: f64, samples: usize },

    #[error("estimator '{0}' is not registered")]
    UnknownEstimator(String),

    #[error("estimator '{estimator}' does not apply: {reason}")]
    Unsupported {
        estimator: &'static str,
        reason: String,
    },

    #[error("evidence for model {index} failed: {source}")]
    MemberFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("replicate {replicate} failed: {source}")]
    ReplicateFailed {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
