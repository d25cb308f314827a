//! Closed-form Gaussian linear model with quadratic regularizer
//! `R(θ) = ½λ²‖θ‖²`, i.e. prior `N(0, λ⁻² I)`.
//!
//! Everything here is exact: posterior precision, MAP (= posterior mean),
//! log-likelihood with all constants, flexibility, and evidence.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evidence::EvidenceDecomposition;
use crate::generic::{GenericModel, NormalizedPrior, Support};
use crate::numeric::{gaussian_log_density_precision, log_det, spd_factor, LN_2PI};

/// Smallest-to-largest Gram eigenvalue ratio below which a rank warning is attached.
pub const RANK_WARNING_RATIO: f64 = 1e-10;

/// Observed responses, with an optional scalar covariate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationSet {
    y: Vec<f64>,
    x: Option<Vec<f64>>,
}

impl ObservationSet {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        Self::build(y, None)
    }

    pub fn with_covariate(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::build(y, Some(x))
    }

    fn build(y: Vec<f64>, x: Option<Vec<f64>>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidInput("observation set needs n >= 1".into()));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("y[{i}] is not finite")));
        }
        if let Some(x) = &x {
            if x.len() != y.len() {
                return Err(Error::DimensionMismatch {
                    what: "covariate length",
                    expected: y.len(),
                    got: x.len(),
                });
            }
            if let Some(i) = x.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("x[{i}] is not finite")));
            }
        }
        Ok(Self { y, x })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> Option<&[f64]> {
        self.x.as_deref()
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.y)
    }
}

/// Model matrix `G` (n×d), noise scale σ and regularizer scale λ.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLinearSpec {
    g: DMatrix<f64>,
    sigma: f64,
    lambda: f64,
}

impl GaussianLinearSpec {
    pub fn new(g: DMatrix<f64>, sigma: f64, lambda: f64) -> Result<Self> {
        if g.nrows() == 0 || g.ncols() == 0 {
            return Err(Error::InvalidInput(format!(
                "model matrix must be at least 1x1, got {}x{}",
                g.nrows(),
                g.ncols()
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidInput("sigma must be positive".into()));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidInput("lambda must be positive".into()));
        }
        if let Some(idx) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "model matrix entry ({}, {}) is not finite",
                idx % g.nrows(),
                idx / g.nrows()
            )));
        }
        Ok(Self { g, sigma, lambda })
    }

    /// Builds `G` from row-major data.
    pub fn from_rows(rows: &[Vec<f64>], sigma: f64, lambda: f64) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput("ragged model matrix rows".into()));
        }
        let g = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
        Self::new(g, sigma, lambda)
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    pub fn d(&self) -> usize {
        self.g.ncols()
    }

    /// Prior precision `P = λ² I_d`.
    pub fn prior_precision(&self) -> DMatrix<f64> {
        DMatrix::identity(self.d(), self.d()) * self.lambda.powi(2)
    }

    /// `½λ²‖θ‖²`.
    pub fn regularizer(&self, theta: &[f64]) -> f64 {
        0.5 * self.lambda.powi(2) * theta.iter().map(|t| t * t).sum::<f64>()
    }

    /// Normalized prior log density `log N(θ; 0, λ⁻² I)`.
    pub fn log_prior(&self, theta: &[f64]) -> f64 {
        let d = self.d() as f64;
        -0.5 * d * LN_2PI + d * self.lambda.ln() - self.regularizer(theta)
    }

    /// Closed-form normalizer of `exp(-R)`: `log Z = (d/2) log(2π/λ²)`.
    pub fn normalized_prior(&self) -> NormalizedPrior {
        NormalizedPrior::closed_form(0.5 * self.d() as f64 * (LN_2PI - 2.0 * self.lambda.ln()))
    }

    fn check_obs(&self, obs: &ObservationSet) -> Result<()> {
        if obs.len() != self.n() {
            return Err(Error::DimensionMismatch {
                what: "observation count",
                expected: self.n(),
                got: obs.len(),
            });
        }
        Ok(())
    }

    /// Wraps this model as a black-box model over `obs`.
    ///
    /// The declared effective box is `±10/λ` per coordinate around the
    /// origin, widened on demand by the integrators.
    pub fn to_generic(&self, obs: &ObservationSet) -> Result<GenericModel> {
        self.check_obs(obs)?;
        let lik_spec = self.clone();
        let reg_spec = self.clone();
        let y = obs.clone();
        let half_width = 10.0 / self.lambda;
        GenericModel::new(
            self.d(),
            Arc::new(move |theta: &[f64]| log_likelihood_slice(&lik_spec, &y, theta)),
            Arc::new(move |theta: &[f64]| reg_spec.regularizer(theta)),
            Support::effective(vec![(-half_width, half_width); self.d()]),
        )
    }
}

/// Closed-form posterior `N(θ̂, P*⁻¹)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPosterior {
    pub theta_hat: DVector<f64>,
    pub post_precision: DMatrix<f64>,
    pub prior_precision: DMatrix<f64>,
}

impl GaussianPosterior {
    /// Marginal posterior standard deviations `sqrt(diag P*⁻¹)`, from Cholesky solves.
    pub fn marginal_sd(&self) -> Result<Vec<f64>> {
        let chol = spd_factor(&self.post_precision, "posterior precision")?;
        let d = self.post_precision.nrows();
        Ok((0..d)
            .map(|i| {
                let mut e = DVector::zeros(d);
                e[i] = 1.0;
                chol.solve(&e)[i].sqrt()
            })
            .collect())
    }
}

/// Eigenvalue diagnostics of `GᵀG`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramDiagnostics {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub rank_warning: bool,
}

pub fn gram_diagnostics(spec: &GaussianLinearSpec) -> GramDiagnostics {
    let gram = spec.g.transpose() * &spec.g;
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let min = eig.min();
    let max = eig.max();
    GramDiagnostics {
        min_eigenvalue: min,
        max_eigenvalue: max,
        rank_warning: min < RANK_WARNING_RATIO * max,
    }
}

/// `P* = σ⁻² GᵀG + λ² I`.
pub fn posterior_precision(spec: &GaussianLinearSpec) -> Result<DMatrix<f64>> {
    let inv_var = spec.sigma.powi(-2);
    let lambda2 = spec.lambda.powi(2);
    let mut p = spec.g.transpose() * &spec.g * inv_var;
    for i in 0..spec.d() {
        p[(i, i)] += lambda2;
    }
    if let Some(idx) = p.iter().position(|v| !v.is_finite()) {
        return Err(Error::NumericFailure(format!(
            "posterior precision entry ({}, {}) is not finite",
            idx % spec.d(),
            idx / spec.d()
        )));
    }
    Ok(p)
}

/// MAP estimate `θ̂ = σ⁻² P*⁻¹ Gᵀy`, solved through the Cholesky factor of `P*`.
pub fn map_estimate(spec: &GaussianLinearSpec, obs: &ObservationSet) -> Result<DVector<f64>> {
    Ok(posterior(spec, obs)?.theta_hat)
}

pub fn posterior(spec: &GaussianLinearSpec, obs: &ObservationSet) -> Result<GaussianPosterior> {
    spec.check_obs(obs)?;
    let post_precision = posterior_precision(spec)?;
    let chol = spd_factor(&post_precision, "posterior precision")?;
    let rhs = spec.g.transpose() * obs.y_vector() / spec.sigma.powi(2);
    let theta_hat = chol.solve(&rhs);
    if theta_hat.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure("MAP estimate is not finite".into()));
    }
    Ok(GaussianPosterior {
        theta_hat,
        post_precision,
        prior_precision: spec.prior_precision(),
    })
}

/// `log f(y; θ) = -(n/2) log(2πσ²) - ‖y - Gθ‖²/(2σ²)`.
pub fn glm_log_likelihood(
    spec: &GaussianLinearSpec,
    obs: &ObservationSet,
    theta: &[f64],
) -> Result<f64> {
    spec.check_obs(obs)?;
    if theta.len() != spec.d() {
        return Err(Error::DimensionMismatch {
            what: "parameter length",
            expected: spec.d(),
            got: theta.len(),
        });
    }
    Ok(log_likelihood_slice(spec, obs, theta))
}

fn log_likelihood_slice(spec: &GaussianLinearSpec, obs: &ObservationSet, theta: &[f64]) -> f64 {
    let (n, d) = spec.g.shape();
    let var = spec.sigma * spec.sigma;
    let mut rss = 0.0;
    for i in 0..n {
        let mut fitted = 0.0;
        for j in 0..d {
            fitted += spec.g[(i, j)] * theta[j];
        }
        let r = obs.y[i] - fitted;
        rss += r * r;
    }
    -0.5 * n as f64 * (LN_2PI + var.ln()) - rss / (2.0 * var)
}

fn flexibility_from(spec: &GaussianLinearSpec, post: &GaussianPosterior) -> Result<f64> {
    let chol = spd_factor(&post.post_precision, "posterior precision")?;
    let d = spec.d() as f64;
    let log_det_ratio = log_det(&chol) - 2.0 * d * spec.lambda.ln();
    Ok(0.5 * log_det_ratio + 0.5 * spec.lambda.powi(2) * post.theta_hat.norm_squared())
}

/// `½ log(det P*/det P) + ½λ²‖θ̂‖²`.
pub fn flexibility_exact(spec: &GaussianLinearSpec, obs: &ObservationSet) -> Result<f64> {
    let post = posterior(spec, obs)?;
    flexibility_from(spec, &post)
}

/// Exact evidence as `log f(y; θ̂) - flexibility`.
pub fn glm_log_evidence(
    spec: &GaussianLinearSpec,
    obs: &ObservationSet,
) -> Result<EvidenceDecomposition> {
    let post = posterior(spec, obs)?;
    let theta_hat: Vec<f64> = post.theta_hat.iter().copied().collect();
    let log_fit = log_likelihood_slice(spec, obs, &theta_hat);
    let flexibility = flexibility_from(spec, &post)?;
    let mut out = EvidenceDecomposition::new(
        "glm-exact",
        log_fit - flexibility,
        log_fit,
        Some(0.0),
        theta_hat,
    );
    if gram_diagnostics(spec).rank_warning {
        out.notes
            .push("model matrix is numerically rank deficient".to_string());
    }
    Ok(out)
}

/// Candidate's formula `log f(y;θ₀) + log π(θ₀) - log π*(θ₀)`, valid at any θ₀.
pub fn evidence_via_candidate(
    spec: &GaussianLinearSpec,
    obs: &ObservationSet,
    theta0: &[f64],
) -> Result<f64> {
    let post = posterior(spec, obs)?;
    let log_lik = glm_log_likelihood(spec, obs, theta0)?;
    let chol = spd_factor(&post.post_precision, "posterior precision")?;
    let t0 = DVector::from_column_slice(theta0);
    let log_post =
        gaussian_log_density_precision(&t0, &post.theta_hat, &post.post_precision, &chol);
    Ok(log_lik + spec.log_prior(theta0) - log_post)
}
