use nalgebra::DVector;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::glm::{glm_log_evidence, map_estimate, ObservationSet};
use crate::rng;

use super::{argmax_lowest_index, polynomial_design, polynomial_family};

/// Test-set size as a multiple of the training size.
pub const TEST_SIZE_FACTOR: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweetSpotConfig {
    pub true_degree: usize,
    pub degrees: Vec<usize>,
    pub n: usize,
    pub sigma: f64,
    pub lambda: f64,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweetSpotReport {
    pub degrees: Vec<usize>,
    pub chosen_counts: Vec<usize>,
    pub chosen_frequency: Vec<f64>,
    pub modal_degree: usize,
    /// Mean out-of-sample RMSE of each candidate's MAP fit.
    pub mean_rmse: Vec<f64>,
    pub mean_chosen_rmse: f64,
    pub mean_best_rmse: f64,
    /// Mean of `rmse(chosen) - rmse(best)` over replicates.
    pub mean_regret: f64,
    /// `mean_regret / mean_best_rmse`.
    pub relative_regret: f64,
    pub test_size: usize,
    pub reps: usize,
    pub seed: u64,
}

struct Replicate {
    chosen: usize,
    rmse: Vec<f64>,
}

/// Polynomial-degree selection by maximum evidence against out-of-sample error.
///
/// Each replicate draws `x ~ N(0,1)`, coefficients of the true degree from its
/// prior, `y = Gθ + σε`, selects by evidence, and scores every candidate's MAP
/// fit on a fresh noisy test set of size `10n` built with the training scaling.
pub fn sweet_spot_experiment(config: &SweetSpotConfig) -> Result<SweetSpotReport> {
    let true_pos = config
        .degrees
        .iter()
        .position(|&p| p == config.true_degree)
        .ok_or_else(|| Error::InvalidInput("true degree is not among the candidate degrees".into()))?;
    if config.reps == 0 || config.n == 0 {
        return Err(Error::InvalidInput("n and reps must be positive".into()));
    }
    let test_size = TEST_SIZE_FACTOR * config.n;
    let k = config.degrees.len();

    let reps: Vec<Replicate> = (0..config.reps)
        .into_par_iter()
        .map(|r| {
            run_replicate(config, true_pos, test_size, r).map_err(|e| Error::ReplicateFailed {
                replicate: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut counts = vec![0usize; k];
    let mut rmse_sum = vec![0.0; k];
    let (mut chosen_sum, mut best_sum, mut regret_sum) = (0.0, 0.0, 0.0);
    for rep in &reps {
        counts[rep.chosen] += 1;
        for (s, v) in rmse_sum.iter_mut().zip(&rep.rmse) {
            *s += v;
        }
        let best = rep.rmse.iter().copied().fold(f64::INFINITY, f64::min);
        chosen_sum += rep.rmse[rep.chosen];
        best_sum += best;
        regret_sum += rep.rmse[rep.chosen] - best;
    }
    let total = config.reps as f64;
    let modal = counts
        .iter()
        .enumerate()
        .fold(0, |m, (i, &c)| if c > counts[m] { i } else { m });
    let mean_best_rmse = best_sum / total;
    let mean_regret = regret_sum / total;
    Ok(SweetSpotReport {
        degrees: config.degrees.clone(),
        chosen_frequency: counts.iter().map(|&c| c as f64 / total).collect(),
        chosen_counts: counts,
        modal_degree: config.degrees[modal],
        mean_rmse: rmse_sum.iter().map(|s| s / total).collect(),
        mean_chosen_rmse: chosen_sum / total,
        mean_best_rmse,
        mean_regret,
        relative_regret: mean_regret / mean_best_rmse,
        test_size,
        reps: config.reps,
        seed: config.seed,
    })
}

fn run_replicate(
    config: &SweetSpotConfig,
    true_pos: usize,
    test_size: usize,
    r: usize,
) -> Result<Replicate> {
    let mut rng = rng::stream(config.seed, r as u64);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let x: Vec<f64> = (0..config.n).map(|_| normal()).collect();
    let family = polynomial_family(&x, &config.degrees, config.sigma, config.lambda)?;
    let true_spec = &family.specs[true_pos];
    let theta = DVector::from_fn(true_spec.d(), |_, _| normal() / config.lambda);
    let y: Vec<f64> = (true_spec.g() * &theta)
        .iter()
        .map(|m| m + config.sigma * normal())
        .collect();
    let obs = ObservationSet::with_covariate(x, y)?;

    let log_e = family
        .specs
        .iter()
        .map(|s| glm_log_evidence(s, &obs).map(|e| e.log_evidence))
        .collect::<Result<Vec<_>>>()?;
    let (chosen, _) = argmax_lowest_index(&log_e);

    let x_test: Vec<f64> = (0..test_size).map(|_| normal()).collect();
    let truth = polynomial_design(&x_test, config.true_degree, family.column_scale)? * &theta;
    let y_test: Vec<f64> = truth.iter().map(|m| m + config.sigma * normal()).collect();
    let rmse = family
        .specs
        .iter()
        .zip(&config.degrees)
        .map(|(spec, &p)| {
            let fit = map_estimate(spec, &obs)?;
            let pred = polynomial_design(&x_test, p, family.column_scale)? * fit;
            let mse = pred
                .iter()
                .zip(&y_test)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                / test_size as f64;
            Ok(mse.sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Replicate { chosen, rmse })
}
