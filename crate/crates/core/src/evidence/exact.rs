use crate::error::{Error, Result};
use crate::glm::glm_log_evidence;

use super::{EstimatorSettings, EvidenceDecomposition, EvidenceEstimator, EvidenceTarget};

/// Closed-form evidence of the Gaussian linear model.
#[derive(Debug, Clone, Copy, Default)]
pub struct GlmExact;

impl EvidenceEstimator for GlmExact {
    fn name(&self) -> &'static str {
        "glm-exact"
    }

    fn description(&self) -> &'static str {
        "closed-form Gaussian linear model evidence"
    }

    fn estimate(&self, target: &EvidenceTarget<'_>, _: &EstimatorSettings) -> Result<EvidenceDecomposition> {
        match *target {
            EvidenceTarget::Gaussian { spec, obs } => glm_log_evidence(spec, obs),
            EvidenceTarget::Generic { .. } => Err(Error::Unsupported {
                estimator: "glm-exact",
                reason: "only Gaussian linear models have a closed form".into(),
            }),
        }
    }
}
