use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::glm::{flexibility_exact, map_estimate, GaussianLinearSpec, ObservationSet};
use crate::numeric::spd_factor;
use crate::rng::{self, StreamRng};

use super::bic_penalty;

/// A dataset of size `n` from an IID design family.
#[derive(Debug, Clone)]
pub struct SweepDraw {
    pub spec: GaussianLinearSpec,
    pub obs: ObservationSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticSweepResult {
    pub ns: Vec<usize>,
    pub flexibilities: Vec<f64>,
    /// `flexibility - (d/2) log n` at each sample size.
    pub gaps: Vec<f64>,
    /// Row-major `n⁻¹ GᵀG` at the largest `n`.
    pub h_hat: Vec<Vec<f64>>,
    /// `θ̂` at the largest `n`.
    pub m_hat: Vec<f64>,
    /// `½{-d(log σ² + log λ²) + log det Ĥ + λ²‖m̂‖²}`.
    pub predicted_constant: f64,
    pub d: usize,
    pub seed: u64,
}

impl AsymptoticSweepResult {
    /// `|gaps[k+1] - gaps[k]|`.
    pub fn gap_steps(&self) -> Vec<f64> {
        self.gaps.windows(2).map(|w| (w[1] - w[0]).abs()).collect()
    }
}

/// Tracks `flexibility - BIC penalty` along increasing sample sizes.
///
/// Dataset `k` is drawn fresh from stream `(seed, k)`; designs are not nested.
pub fn bic_sweep<F>(generator: F, ns: &[usize], seed: u64) -> Result<AsymptoticSweepResult>
where
    F: Fn(usize, &mut StreamRng) -> Result<SweepDraw>,
{
    if ns.is_empty() {
        return Err(Error::InvalidInput("sample-size list is empty".into()));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "sample sizes must be positive and strictly increasing".into(),
        ));
    }
    let mut flexibilities = Vec::with_capacity(ns.len());
    let mut gaps = Vec::with_capacity(ns.len());
    let mut d = None;
    let mut last = None;
    for (k, &n) in ns.iter().enumerate() {
        let mut rng = rng::stream(seed, k as u64);
        let draw = generator(n, &mut rng)?;
        if draw.spec.n() != n {
            return Err(Error::DimensionMismatch {
                what: "generated sample size",
                expected: n,
                got: draw.spec.n(),
            });
        }
        match d {
            None => d = Some(draw.spec.d()),
            Some(d0) if d0 != draw.spec.d() => {
                return Err(Error::DimensionMismatch {
                    what: "parameter dimension across the sweep",
                    expected: d0,
                    got: draw.spec.d(),
                })
            }
            _ => {}
        }
        let flex = flexibility_exact(&draw.spec, &draw.obs)?;
        flexibilities.push(flex);
        gaps.push(flex - bic_penalty(draw.spec.d(), n));
        last = Some(draw);
    }
    let draw = last.expect("non-empty sweep");
    let d = draw.spec.d();
    let n = draw.spec.n() as f64;
    let h = draw.spec.g().transpose() * draw.spec.g() / n;
    let m = map_estimate(&draw.spec, &draw.obs)?;
    let log_det_h = crate::numeric::log_det(&spd_factor(&h, "limiting Gram matrix")?);
    let (s2, l2) = (draw.spec.sigma().powi(2), draw.spec.lambda().powi(2));
    let predicted_constant =
        0.5 * (-(d as f64) * (s2.ln() + l2.ln()) + log_det_h + l2 * m.norm_squared());
    Ok(AsymptoticSweepResult {
        ns: ns.to_vec(),
        flexibilities,
        gaps,
        h_hat: (0..d).map(|i| (0..d).map(|j| h[(i, j)]).collect()).collect(),
        m_hat: m.iter().copied().collect(),
        predicted_constant,
        d,
        seed,
    })
}

/// Design `[1, x, …, x^{d-1}]` with `x ~ N(0, 1)` and `y = Gθ + σε`, `d = θ.len()`.
pub fn polynomial_design_generator(
    theta: Vec<f64>,
    sigma: f64,
    lambda: f64,
) -> impl Fn(usize, &mut StreamRng) -> Result<SweepDraw> {
    move |n, rng| {
        let d = theta.len();
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let g = DMatrix::from_fn(n, d, |i, j| x[i].powi(j as i32));
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let noise: f64 = StandardNormal.sample(rng);
                (0..d).map(|j| g[(i, j)] * theta[j]).sum::<f64>() + sigma * noise
            })
            .collect();
        Ok(SweepDraw {
            spec: GaussianLinearSpec::new(g, sigma, lambda)?,
            obs: ObservationSet::with_covariate(x, y)?,
        })
    }
}

/// `G = 1_n`, `y = 0`: flexibility is `½ log(1 + n/(σ²λ²))` exactly.
pub fn constant_design_generator(
    sigma: f64,
    lambda: f64,
) -> impl Fn(usize, &mut StreamRng) -> Result<SweepDraw> {
    move |n, _| {
        Ok(SweepDraw {
            spec: GaussianLinearSpec::new(DMatrix::from_element(n, 1, 1.0), sigma, lambda)?,
            obs: ObservationSet::new(vec![0.0; n])?,
        })
    }
}
