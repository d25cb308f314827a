use crate::error::{Error, Result};
use crate::generic::{GenericModel, NormalizedPrior};
use crate::grid::log_trapezoid;

use super::laplace::laplace_curvature;
use super::registry::{locate_map, resolve_generic};
use super::{EstimatorSettings, EvidenceDecomposition, EvidenceEstimator, EvidenceTarget};

/// Half-width of the integration box in posterior standard deviations.
const BOX_SDS: f64 = 10.0;

/// Log-space trapezoid evidence for `d ≤ 3`.
///
/// The box is centered on the MAP with half-width ten Laplace standard
/// deviations (clipped to hard bounds, open faces widened on demand); the
/// whole support box is used when the curvature at the mode is unusable.
pub fn evidence_quadrature(
    model: &GenericModel,
    prior: &NormalizedPrior,
    theta_hat: &[f64],
    grid_points_per_dim: usize,
    tolerance: f64,
) -> Result<EvidenceDecomposition> {
    if model.dim() > 3 {
        return Err(Error::Unsupported {
            estimator: "quadrature",
            reason: format!("dimension {} exceeds 3", model.dim()),
        });
    }
    let axes = match laplace_curvature(model, theta_hat) {
        Ok(curv) => {
            let cov = curv.cholesky.inverse();
            let half: Vec<f64> = (0..model.dim()).map(|k| BOX_SDS * cov[(k, k)].sqrt()).collect();
            model.support().axes_around(theta_hat, &half)
        }
        Err(_) => model.support().axes(),
    };
    let log_norm = prior.log_norm_const;
    let integrand = |t: &[f64]| model.objective(t) - log_norm;
    let grid = log_trapezoid(&integrand, &axes, grid_points_per_dim)?;
    let err = grid.err_estimate + prior.err_estimate;
    if err > tolerance {
        return Err(Error::AccuracyFailure {
            fine: grid.log_value,
            coarse: grid.log_coarse,
            err_estimate: err,
            tolerance,
        });
    }
    let log_fit = model.log_lik(theta_hat);
    let mut out = EvidenceDecomposition::new("quadrature", grid.log_value, log_fit, Some(err), theta_hat.to_vec());
    if grid.doublings > 0 {
        out.notes
            .push(format!("integration box widened {} times", grid.doublings));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Quadrature;

impl EvidenceEstimator for Quadrature {
    fn name(&self) -> &'static str {
        "quadrature"
    }

    fn description(&self) -> &'static str {
        "composite trapezoid rule in log space (d <= 3)"
    }

    fn estimate(&self, target: &EvidenceTarget<'_>, settings: &EstimatorSettings) -> Result<EvidenceDecomposition> {
        let (model, prior) = resolve_generic(target, settings)?;
        if model.dim() > 3 {
            return Err(Error::Unsupported {
                estimator: "quadrature",
                reason: format!("dimension {} exceeds 3", model.dim()),
            });
        }
        let (theta_hat, notes) = locate_map(&model, settings)?;
        let mut out = evidence_quadrature(
            &model,
            &prior,
            &theta_hat,
            settings.grid_points,
            settings.quadrature_tolerance,
        )?;
        out.notes.extend(notes);
        Ok(out)
    }
}
