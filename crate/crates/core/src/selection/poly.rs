use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::glm::GaussianLinearSpec;
use crate::numeric::mean_sd;

use super::{Member, ModelSet};

/// Polynomial regressions indexed by degree.
///
/// Column `k` is `(x / s)^k` with `s` the standard deviation of the training
/// covariate; the regularizer acts on these scaled coefficients, which is the
/// same as a rescaled prior on raw coefficients.
#[derive(Debug, Clone)]
pub struct PolynomialFamily {
    pub set: ModelSet,
    pub degrees: Vec<usize>,
    pub specs: Vec<GaussianLinearSpec>,
    pub column_scale: f64,
    pub warnings: Vec<String>,
}

/// Scaled Vandermonde matrix `[1, x/s, …, (x/s)^degree]`.
pub fn polynomial_design(x: &[f64], degree: usize, scale: f64) -> Result<DMatrix<f64>> {
    let g = DMatrix::from_fn(x.len(), degree + 1, |i, k| (x[i] / scale).powi(k as i32));
    if let Some(idx) = g.iter().position(|v| !v.is_finite()) {
        return Err(Error::NumericFailure(format!(
            "power {} of x[{}] is not finite",
            idx / x.len(),
            idx % x.len()
        )));
    }
    Ok(g)
}

pub fn polynomial_family(
    x: &[f64],
    degrees: &[usize],
    sigma: f64,
    lambda: f64,
) -> Result<PolynomialFamily> {
    if x.is_empty() {
        return Err(Error::InvalidInput("covariate vector is empty".into()));
    }
    if degrees.is_empty() {
        return Err(Error::InvalidInput("no degrees requested".into()));
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("degrees must be distinct".into()));
    }
    let mut warnings = Vec::new();
    let (_, sd) = mean_sd(x);
    let column_scale = if sd > 0.0 && sd.is_finite() {
        sd
    } else {
        warnings.push("covariate has zero spread; columns left unscaled".to_string());
        1.0
    };
    let max_degree = *sorted.last().expect("non-empty");
    if max_degree + 1 > x.len() {
        warnings.push(format!(
            "degree {max_degree} has more coefficients than the {} observations",
            x.len()
        ));
    }
    let specs = degrees
        .iter()
        .map(|&p| GaussianLinearSpec::new(polynomial_design(x, p, column_scale)?, sigma, lambda))
        .collect::<Result<Vec<_>>>()?;
    let set = ModelSet::uniform(specs.iter().cloned().map(Member::Gaussian).collect())?
        .with_labels(degrees.iter().map(|p| format!("degree-{p}")).collect())?;
    Ok(PolynomialFamily {
        set,
        degrees: degrees.to_vec(),
        specs,
        column_scale,
        warnings,
    })
}
