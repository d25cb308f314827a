//! Small numerical helpers shared by the estimators.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Streaming log-sum-exp accumulator.
///
/// Keeps a running maximum so that `exp` never overflows; terms equal to
/// `-inf` are accepted and contribute nothing.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled_sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled_sum: 0.0,
        }
    }

    pub fn push(&mut self, value: f64) {
        if value == f64::NEG_INFINITY {
            return;
        }
        if value <= self.max {
            self.scaled_sum += (value - self.max).exp();
        } else {
            self.scaled_sum = self.scaled_sum * (self.max - value).exp() + 1.0;
            self.max = value;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled_sum.ln()
        }
    }
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let mut acc = LogSumExp::new();
    for &v in values {
        acc.push(v);
    }
    acc.value()
}

/// Cholesky factor of a symmetric positive definite matrix.
pub fn spd_factor(matrix: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    if let Some((idx, v)) = matrix.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        let (r, c) = (idx % matrix.nrows(), idx / matrix.nrows());
        return Err(Error::NumericFailure(format!(
            "{what}: non-finite entry {v} at ({r}, {c})"
        )));
    }
    Cholesky::new(matrix.clone())
        .ok_or_else(|| Error::NumericFailure(format!("{what}: not positive definite")))
}

/// `log det` of the factored matrix, from the diagonal of its triangular factor.
pub fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    let l = chol.l_dirty();
    2.0 * (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>()
}

/// Log density of `N(mean, precision^{-1})` at `x`, given the Cholesky factor of the precision.
pub fn gaussian_log_density_precision(
    x: &DVector<f64>,
    mean: &DVector<f64>,
    precision: &DMatrix<f64>,
    precision_chol: &Cholesky<f64, Dyn>,
) -> f64 {
    let d = x.len() as f64;
    let diff = x - mean;
    let quad = diff.dot(&(precision * &diff));
    -0.5 * d * LN_2PI + 0.5 * log_det(precision_chol) - 0.5 * quad
}

/// Central-difference gradient with step `rel_step * (1 + |x_k|)`.
pub fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], rel_step: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            let h = rel_step * (1.0 + x[k].abs());
            probe[k] = x[k] + h;
            let up = f(&probe);
            probe[k] = x[k] - h;
            let down = f(&probe);
            probe[k] = x[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Hessian with step `rel_step * (1 + |x_k|)`.
pub fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], rel_step: f64) -> DMatrix<f64> {
    let d = x.len();
    let h: Vec<f64> = x.iter().map(|v| rel_step * (1.0 + v.abs())).collect();
    let f0 = f(x);
    let mut probe = x.to_vec();
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        probe[i] = x[i] + h[i];
        let up = f(&probe);
        probe[i] = x[i] - h[i];
        let down = f(&probe);
        probe[i] = x[i];
        hess[(i, i)] = (up - 2.0 * f0 + down) / (h[i] * h[i]);
        for j in 0..i {
            let mut eval = |si: f64, sj: f64| {
                probe[i] = x[i] + si * h[i];
                probe[j] = x[j] + sj * h[j];
                let v = f(&probe);
                probe[i] = x[i];
                probe[j] = x[j];
                v
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0))
                / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Sample mean and (population) standard deviation.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
