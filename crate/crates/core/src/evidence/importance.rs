use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generic::{GenericModel, NormalizedPrior};
use crate::numeric::{log_det, log_sum_exp, spd_factor, LN_2PI};
use crate::rng;

use super::laplace::laplace_curvature;
use super::registry::{locate_map, resolve_generic};
use super::{EstimatorSettings, EvidenceDecomposition, EvidenceEstimator, EvidenceTarget};

/// Draws below this fraction of effective sample size are rejected.
pub const MIN_ESS_FRACTION: f64 = 0.01;

/// Gaussian proposal `N(mean, inflation² · precision⁻¹)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProposal {
    pub mean: Vec<f64>,
    pub precision: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportanceSettings {
    pub samples: usize,
    pub seed: u64,
    pub inflation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportanceOutcome {
    pub decomposition: EvidenceDecomposition,
    pub effective_sample_size: f64,
    pub samples: usize,
    pub inflation: f64,
}

/// Importance-sampling evidence `log mean exp(log f + log π - log q)`.
///
/// Draw `i` uses stream `(seed, i)` only, so the result does not depend on
/// how the draws are scheduled across threads.
pub fn evidence_importance(
    model: &GenericModel,
    prior: &NormalizedPrior,
    theta_hat: &[f64],
    proposal: &GaussianProposal,
    settings: &ImportanceSettings,
) -> Result<ImportanceOutcome> {
    let d = model.dim();
    if settings.samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    if !(settings.inflation.is_finite() && settings.inflation > 0.0) {
        return Err(Error::InvalidInput("inflation must be positive".into()));
    }
    if proposal.mean.len() != d || proposal.precision.nrows() != d {
        return Err(Error::DimensionMismatch {
            what: "proposal dimension",
            expected: d,
            got: proposal.mean.len(),
        });
    }
    let chol = spd_factor(&proposal.precision, "proposal precision")?;
    let upper = chol.l().transpose();
    let s = settings.inflation;
    // log q(θ) = -d/2 log 2π - d log s + ½ log det A - ½‖z‖²
    let log_q_const = -0.5 * d as f64 * LN_2PI - d as f64 * s.ln() + 0.5 * log_det(&chol);
    let mean = DVector::from_column_slice(&proposal.mean);

    let log_weights: Vec<f64> = (0..settings.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(settings.seed, i as u64);
            let z = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
            let offset = upper
                .solve_upper_triangular(&z)
                .expect("triangular factor has a positive diagonal");
            let theta: Vec<f64> = (&mean + offset * s).iter().copied().collect();
            let log_target = model.objective(&theta) - prior.log_norm_const;
            log_target - (log_q_const - 0.5 * z.norm_squared())
        })
        .collect();

    if let Some(bad) = log_weights.iter().find(|v| v.is_nan() || **v == f64::INFINITY) {
        return Err(Error::NumericFailure(format!("importance log weight is {bad}")));
    }
    let n = settings.samples as f64;
    let lse = log_sum_exp(&log_weights);
    if lse == f64::NEG_INFINITY {
        return Err(Error::Degeneracy { ess: 0.0, samples: settings.samples });
    }
    let doubled: Vec<f64> = log_weights.iter().map(|w| 2.0 * w).collect();
    let ess = (2.0 * lse - log_sum_exp(&doubled)).exp();
    if ess < MIN_ESS_FRACTION * n {
        return Err(Error::Degeneracy { ess, samples: settings.samples });
    }
    let log_e = lse - n.ln();

    // delta method: se(log Ê) ≈ sd(w) / (mean(w) √N)
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
    let mu = scaled.iter().sum::<f64>() / n;
    let var = scaled.iter().map(|w| (w - mu).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let err = var.sqrt() / (mu * n.sqrt());

    let log_fit = model.log_lik(theta_hat);
    let mut out = EvidenceDecomposition::new(
        "importance-sampling",
        log_e,
        log_fit,
        Some(err),
        theta_hat.to_vec(),
    );
    out.notes.push(format!(
        "proposal inflation {s}; effective sample size {ess:.1} of {}",
        settings.samples
    ));
    Ok(ImportanceOutcome {
        decomposition: out,
        effective_sample_size: ess,
        samples: settings.samples,
        inflation: s,
    })
}

/// Effective sample size is reported in the notes; see [`evidence_importance`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ImportanceSampling;

impl EvidenceEstimator for ImportanceSampling {
    fn name(&self) -> &'static str {
        "importance-sampling"
    }

    fn description(&self) -> &'static str {
        "importance sampling from an inflated Laplace proposal"
    }

    fn estimate(&self, target: &EvidenceTarget<'_>, settings: &EstimatorSettings) -> Result<EvidenceDecomposition> {
        let (model, prior) = resolve_generic(target, settings)?;
        let (theta_hat, notes) = locate_map(&model, settings)?;
        let curv = laplace_curvature(&model, &theta_hat)?;
        let proposal = GaussianProposal {
            mean: theta_hat.clone(),
            precision: curv.hessian,
        };
        let is = ImportanceSettings {
            samples: settings.samples,
            seed: settings.seed,
            inflation: settings.inflation,
        };
        let mut out = evidence_importance(&model, &prior, &theta_hat, &proposal, &is)?.decomposition;
        out.notes.extend(notes);
        Ok(out)
    }
}
