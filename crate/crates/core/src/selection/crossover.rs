use serde::Serialize;

use crate::error::{Error, Result};
use crate::glm::{glm_log_evidence, GaussianLinearSpec, ObservationSet};

/// Bisection stops once the bracket is narrower than this (relative to `1 + |y|`).
const BISECTION_WIDTH: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    pub y: f64,
    /// `|log E_simple(y) - log E_complex(y)|` at the located point.
    pub residual: f64,
}

/// Log-evidence of two single-observation models across a grid of observed values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverReport {
    pub y_grid: Vec<f64>,
    pub log_evidence_simple: Vec<f64>,
    pub log_evidence_complex: Vec<f64>,
    /// Sign of `log E_simple - log E_complex` at each grid value.
    pub sign_pattern: Vec<i8>,
    pub crossovers: Vec<Crossover>,
    pub simple_marginal_variance: f64,
    pub complex_marginal_variance: f64,
    /// Crossing points of the two zero-mean marginal densities, when they differ.
    pub analytic_crossovers: Vec<f64>,
    pub simple_wins_somewhere: bool,
    pub complex_wins_somewhere: bool,
    /// Unequal marginal variances guarantee both regions; true when the grid shows them.
    pub both_regions_found: bool,
}

fn scalar_log_evidence(spec: &GaussianLinearSpec, y: f64) -> Result<f64> {
    Ok(glm_log_evidence(spec, &ObservationSet::new(vec![y])?)?.log_evidence)
}

/// Marginal variance `σ² + ‖g‖²/λ²` of a single observation.
fn marginal_variance(spec: &GaussianLinearSpec) -> f64 {
    spec.sigma().powi(2) + spec.g().norm_squared() / spec.lambda().powi(2)
}

pub fn mackay_crossover(
    simple: &GaussianLinearSpec,
    complex: &GaussianLinearSpec,
    y_grid: &[f64],
) -> Result<CrossoverReport> {
    if simple.n() != 1 || complex.n() != 1 {
        return Err(Error::InvalidInput(
            "crossover demo needs single-observation models (n = 1)".into(),
        ));
    }
    if y_grid.len() < 2 || y_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "y grid must have at least two strictly increasing values".into(),
        ));
    }
    let diff = |y: f64| -> Result<f64> {
        Ok(scalar_log_evidence(simple, y)? - scalar_log_evidence(complex, y)?)
    };
    let mut les = Vec::with_capacity(y_grid.len());
    let mut lec = Vec::with_capacity(y_grid.len());
    for &y in y_grid {
        les.push(scalar_log_evidence(simple, y)?);
        lec.push(scalar_log_evidence(complex, y)?);
    }
    let d: Vec<f64> = les.iter().zip(&lec).map(|(a, b)| a - b).collect();
    let sign_pattern: Vec<i8> = d
        .iter()
        .map(|v| if *v > 0.0 { 1 } else if *v < 0.0 { -1 } else { 0 })
        .collect();

    let mut crossovers = Vec::new();
    let mut last_nonzero: Option<usize> = None;
    for i in 0..y_grid.len() {
        if sign_pattern[i] == 0 {
            continue;
        }
        if let Some(j) = last_nonzero {
            if sign_pattern[j] != sign_pattern[i] {
                let y = if i == j + 1 {
                    bisect(&diff, y_grid[j], y_grid[i], d[j])?
                } else {
                    // exact zero on the grid between opposite signs
                    y_grid[(j + 1..i).find(|&k| sign_pattern[k] == 0).expect("zero between")]
                };
                crossovers.push(Crossover {
                    y,
                    residual: diff(y)?.abs(),
                });
            }
        }
        last_nonzero = Some(i);
    }

    let vs = marginal_variance(simple);
    let vc = marginal_variance(complex);
    let analytic_crossovers = if (vs - vc).abs() > 0.0 {
        let r = (vs * vc * (vc / vs).ln() / (vc - vs)).sqrt();
        vec![-r, r]
    } else {
        Vec::new()
    };
    let simple_wins_somewhere = sign_pattern.iter().any(|&s| s > 0);
    let complex_wins_somewhere = sign_pattern.iter().any(|&s| s < 0);
    Ok(CrossoverReport {
        y_grid: y_grid.to_vec(),
        log_evidence_simple: les,
        log_evidence_complex: lec,
        sign_pattern,
        crossovers,
        simple_marginal_variance: vs,
        complex_marginal_variance: vc,
        analytic_crossovers,
        simple_wins_somewhere,
        complex_wins_somewhere,
        both_regions_found: simple_wins_somewhere && complex_wins_somewhere,
    })
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64> {
    let lo_positive = f_lo > 0.0;
    for _ in 0..200 {
        if hi - lo <= BISECTION_WIDTH * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
