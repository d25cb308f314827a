use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};
use crate::generic::{GenericModel, NormalizedPrior, HESSIAN_STEP};
use crate::numeric::{fd_hessian, log_det, LN_2PI};

use super::quadrature::evidence_quadrature;
use super::registry::{locate_map, resolve_generic};
use super::{EstimatorSettings, EvidenceDecomposition, EvidenceEstimator, EvidenceTarget};

/// Curvature `A` of `-(log f + log π)` at a mode.
pub struct Curvature {
    pub hessian: DMatrix<f64>,
    pub cholesky: Cholesky<f64, Dyn>,
}

pub fn laplace_curvature(model: &GenericModel, theta_hat: &[f64]) -> Result<Curvature> {
    let objective = |t: &[f64]| model.objective(t);
    let hessian = -fd_hessian(&objective, theta_hat, HESSIAN_STEP);
    if hessian.iter().any(|v| !v.is_finite()) {
        return Err(Error::CurvatureFailure("non-finite Hessian entry".into()));
    }
    let cholesky = hessian
        .clone()
        .cholesky()
        .ok_or_else(|| Error::CurvatureFailure("saddle or ridge at the mode".into()))?;
    Ok(Curvature { hessian, cholesky })
}

/// First-order Laplace approximation
/// `log f(θ̂) + log π(θ̂) + (d/2) log 2π - ½ log det A`.
pub fn evidence_laplace(
    model: &GenericModel,
    prior: &NormalizedPrior,
    theta_hat: &[f64],
) -> Result<EvidenceDecomposition> {
    let curv = laplace_curvature(model, theta_hat)?;
    let d = model.dim() as f64;
    let log_fit = model.log_lik(theta_hat);
    let log_joint = log_fit + model.log_prior(theta_hat, prior);
    let log_e = log_joint + 0.5 * d * LN_2PI - 0.5 * log_det(&curv.cholesky);
    Ok(EvidenceDecomposition::new("laplace", log_e, log_fit, None, theta_hat.to_vec()))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Laplace;

impl EvidenceEstimator for Laplace {
    fn name(&self) -> &'static str {
        "laplace"
    }

    fn description(&self) -> &'static str {
        "first-order Laplace approximation at the MAP"
    }

    /// The error estimate is the distance to a quadrature check when `d ≤ 3`
    /// and unknown otherwise.
    fn estimate(&self, target: &EvidenceTarget<'_>, settings: &EstimatorSettings) -> Result<EvidenceDecomposition> {
        let (model, prior) = resolve_generic(target, settings)?;
        let (theta_hat, notes) = locate_map(&model, settings)?;
        let mut out = evidence_laplace(&model, &prior, &theta_hat)?;
        out.notes.extend(notes);
        if model.dim() <= 3 {
            match evidence_quadrature(&model, &prior, &theta_hat, settings.check_grid_points, f64::INFINITY) {
                Ok(check) => out.err_estimate = Some((out.log_evidence - check.log_evidence).abs()),
                Err(e) => out.notes.push(format!("quadrature check unavailable: {e}")),
            }
        } else {
            out.notes
                .push("error estimate unknown: dimension above 3".to_string());
        }
        Ok(out)
    }
}
