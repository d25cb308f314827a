#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use ockham::generic::{GenericModel, Support};
use ockham::rng::{stream, StreamRng};
use ockham::{GaussianLinearSpec, ObservationSet};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal(rng: &mut StreamRng) -> f64 {
    StandardNormal.sample(rng)
}

/// Random GLM instance: standard-normal design, θ from the prior, Gaussian noise.
pub fn random_glm(rng: &mut StreamRng, n: usize, d: usize, sigma: f64, lambda: f64) -> (GaussianLinearSpec, ObservationSet) {
    let g = DMatrix::from_fn(n, d, |_, _| normal(rng));
    let theta: Vec<f64> = (0..d).map(|_| normal(rng) / lambda).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| (0..d).map(|j| g[(i, j)] * theta[j]).sum::<f64>() + sigma * normal(rng))
        .collect();
    (
        GaussianLinearSpec::new(g, sigma, lambda).unwrap(),
        ObservationSet::new(y).unwrap(),
    )
}

pub fn random_glm_seeded(seed: u64, n: usize, d: usize, sigma: f64, lambda: f64) -> (GaussianLinearSpec, ObservationSet) {
    random_glm(&mut stream(seed, 0), n, d, sigma, lambda)
}

pub fn uniform(rng: &mut StreamRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Oracle: `log N(y; 0, σ²I + λ⁻² GGᵀ)`, the prior-predictive density,
/// computed in data space by an explicit n×n Cholesky factorization.
pub fn marginal_gaussian_oracle(spec: &GaussianLinearSpec, obs: &ObservationSet) -> f64 {
    let n = spec.n();
    let g = spec.g();
    let mut cov = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..spec.d() {
                s += g[(i, k)] * g[(j, k)];
            }
            cov[i][j] = s / spec.lambda().powi(2);
        }
        cov[i][i] += spec.sigma().powi(2);
    }
    // plain Cholesky–Banachiewicz
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][j] = (cov[i][i] - s).sqrt();
            } else {
                l[i][j] = (cov[i][j] - s) / l[j][j];
            }
        }
    }
    let y = obs.y();
    let mut z = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * z[k]).sum();
        z[i] = (y[i] - s) / l[i][i];
    }
    let log_det: f64 = 2.0 * (0..n).map(|i| l[i][i].ln()).sum::<f64>();
    -0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln() - 0.5 * log_det
        - 0.5 * z.iter().map(|v| v * v).sum::<f64>()
}

/// Oracle: triple-loop `σ⁻² GᵀG + λ² I`.
pub fn naive_posterior_precision(spec: &GaussianLinearSpec) -> Vec<Vec<f64>> {
    let (n, d) = (spec.n(), spec.d());
    let g = spec.g();
    let mut out = vec![vec![0.0; d]; d];
    for a in 0..d {
        for b in 0..d {
            let mut s = 0.0;
            for i in 0..n {
                s += g[(i, a)] * g[(i, b)];
            }
            out[a][b] = s / spec.sigma().powi(2) + if a == b { spec.lambda().powi(2) } else { 0.0 };
        }
    }
    out
}

/// Oracle: sum of scalar normal log densities.
pub fn per_coordinate_log_lik(spec: &GaussianLinearSpec, obs: &ObservationSet, theta: &[f64]) -> f64 {
    let g = spec.g();
    let s = spec.sigma();
    (0..spec.n())
        .map(|i| {
            let mean: f64 = (0..spec.d()).map(|j| g[(i, j)] * theta[j]).sum();
            let z = (obs.y()[i] - mean) / s;
            -0.5 * (2.0 * std::f64::consts::PI).ln() - s.ln() - 0.5 * z * z
        })
        .sum()
}

/// Oracle: Newton iteration on `log f(θ) - ½λ²‖θ‖²` with analytic
/// gradient `σ⁻²Gᵀ(y - Gθ) - λ²θ` and Hessian, solved by Gaussian elimination.
pub fn newton_map_oracle(spec: &GaussianLinearSpec, obs: &ObservationSet) -> Vec<f64> {
    let d = spec.d();
    let h = naive_posterior_precision(spec);
    let mut theta = vec![0.0; d];
    for _ in 0..5 {
        let g = spec.g();
        let mut grad = vec![0.0; d];
        for i in 0..spec.n() {
            let fitted: f64 = (0..d).map(|j| g[(i, j)] * theta[j]).sum();
            for (a, gr) in grad.iter_mut().enumerate() {
                *gr += g[(i, a)] * (obs.y()[i] - fitted) / spec.sigma().powi(2);
            }
        }
        for a in 0..d {
            grad[a] -= spec.lambda().powi(2) * theta[a];
        }
        let step = gauss_solve(h.clone(), grad);
        for a in 0..d {
            theta[a] += step[a];
        }
    }
    theta
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// One-parameter logistic regression through the origin on 10 synthetic
/// points, `R(θ) = θ²/2`.
pub fn logistic_model(seed: u64) -> (GenericModel, Vec<(f64, f64)>) {
    let mut rng = stream(seed, 0);
    let data: Vec<(f64, f64)> = (0..10)
        .map(|_| {
            let x = normal(&mut rng);
            let p = 1.0 / (1.0 + (-1.5 * x).exp());
            let y = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
            (x, y)
        })
        .collect();
    let captured = data.clone();
    let model = GenericModel::new(
        1,
        Arc::new(move |t: &[f64]| {
            captured
                .iter()
                .map(|(x, y)| {
                    let eta = t[0] * x;
                    y * eta - (1.0 + eta.exp()).ln()
                })
                .sum()
        }),
        Arc::new(|t: &[f64]| 0.5 * t[0] * t[0]),
        Support::effective(vec![(-10.0, 10.0)]),
    )
    .unwrap();
    (model, data)
}

/// Oracle: argmax over a uniform grid.
pub fn grid_argmax(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..points {
        let t = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    best.0
}

pub fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}
