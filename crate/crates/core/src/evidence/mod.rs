//! Evidence estimation and the exact split `log E = log f(y; θ̂) - flexibility`.
//!
//! Estimators implement [`EvidenceEstimator`] and are looked up by name in an
//! [`EstimatorRegistry`]; the built-in set is `glm-exact`, `quadrature`,
//! `laplace` and `importance-sampling`.

mod exact;
mod importance;
mod laplace;
mod penalty;
mod quadrature;
mod registry;
mod sweep;

use serde::Serialize;

pub use exact::GlmExact;
pub use importance::{
    evidence_importance, GaussianProposal, ImportanceOutcome, ImportanceSampling, ImportanceSettings,
};
pub use laplace::{evidence_laplace, laplace_curvature, Laplace};
pub use penalty::{bic_penalty, pen_prime, PenaltyComparison};
pub use quadrature::{evidence_quadrature, Quadrature};
pub use registry::{
    EstimatorRegistry, EstimatorSettings, EvidenceEstimator, EvidenceTarget,
};
pub use sweep::{
    bic_sweep, constant_design_generator, polynomial_design_generator, AsymptoticSweepResult,
    SweepDraw,
};

pub const PRIOR_CONFLICT_NOTE: &str =
    "negative flexibility: prior and likelihood are in conflict";

/// Evidence together with its fit and flexibility parts.
///
/// `log_evidence + flexibility == log_fit` holds by construction for every
/// estimator; for approximate estimators flexibility is the difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceDecomposition {
    pub log_evidence: f64,
    pub log_fit: f64,
    pub flexibility: f64,
    pub estimator: String,
    /// `None` when the estimator cannot bound its error.
    pub err_estimate: Option<f64>,
    pub theta_hat: Vec<f64>,
    pub notes: Vec<String>,
}

impl EvidenceDecomposition {
    pub fn new(
        estimator: &str,
        log_evidence: f64,
        log_fit: f64,
        err_estimate: Option<f64>,
        theta_hat: Vec<f64>,
    ) -> Self {
        let parts = decompose(log_evidence, log_fit);
        let mut notes = Vec::new();
        if parts.prior_likelihood_conflict {
            notes.push(PRIOR_CONFLICT_NOTE.to_string());
        }
        Self {
            log_evidence,
            log_fit,
            flexibility: parts.flexibility,
            estimator: estimator.to_string(),
            err_estimate,
            theta_hat,
            notes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub log_evidence: f64,
    pub log_fit: f64,
    pub flexibility: f64,
    pub prior_likelihood_conflict: bool,
}

/// `flexibility = log_fit - log_evidence`. Negative values are kept and flagged.
pub fn decompose(log_evidence: f64, log_fit: f64) -> Decomposition {
    let flexibility = log_fit - log_evidence;
    Decomposition {
        log_evidence,
        log_fit,
        flexibility,
        prior_likelihood_conflict: flexibility < 0.0,
    }
}
