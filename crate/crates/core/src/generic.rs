//! Black-box models: a log-likelihood `θ ↦ log f(y^obs; θ)` and a
//! regularizer `R(θ)` over a box, with `π ∝ exp(-R)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{log_trapezoid, Axis};
use crate::numeric::{fd_gradient, fd_hessian};
use crate::rng;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub const MAX_ITERATIONS: usize = 500;
pub const GRADIENT_TOLERANCE: f64 = 1e-6;
pub const HESSIAN_TOLERANCE: f64 = 1e-4;
/// Relative finite-difference step for gradients.
pub const GRADIENT_STEP: f64 = 1e-5;
/// Relative finite-difference step for Hessians.
pub const HESSIAN_STEP: f64 = 1e-3;
pub const DEFAULT_MULTISTARTS: usize = 8;

/// One coordinate of the parameter box. An `effective` interval stands in
/// for an unbounded coordinate and may be widened by the integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub effective: bool,
}

impl Interval {
    fn axis(&self) -> Axis {
        if self.effective {
            Axis::open(self.lo, self.hi)
        } else {
            Axis::fixed(self.lo, self.hi)
        }
    }

    fn clamp(&self, v: f64) -> f64 {
        if self.effective {
            v
        } else {
            v.clamp(self.lo, self.hi)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Support {
    intervals: Vec<Interval>,
}

impl Support {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        for (k, iv) in intervals.iter().enumerate() {
            if !(iv.lo.is_finite() && iv.hi.is_finite() && iv.lo < iv.hi) {
                return Err(Error::InvalidInput(format!(
                    "support interval {k} [{}, {}] must be finite and non-empty",
                    iv.lo, iv.hi
                )));
            }
        }
        Ok(Self { intervals })
    }

    /// Hard bounds on every coordinate.
    pub fn bounded(bounds: Vec<(f64, f64)>) -> Self {
        Self {
            intervals: bounds
                .into_iter()
                .map(|(lo, hi)| Interval { lo, hi, effective: false })
                .collect(),
        }
    }

    /// Unbounded coordinates with a declared effective integration box.
    pub fn effective(bounds: Vec<(f64, f64)>) -> Self {
        Self {
            intervals: bounds
                .into_iter()
                .map(|(lo, hi)| Interval { lo, hi, effective: true })
                .collect(),
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta
            .iter()
            .zip(&self.intervals)
            .all(|(t, iv)| iv.effective || (iv.lo..=iv.hi).contains(t))
    }

    pub fn project(&self, theta: &mut [f64]) {
        for (t, iv) in theta.iter_mut().zip(&self.intervals) {
            *t = iv.clamp(*t);
        }
    }

    pub fn center(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| 0.5 * (iv.lo + iv.hi)).collect()
    }

    pub fn axes(&self) -> Vec<Axis> {
        self.intervals.iter().map(Interval::axis).collect()
    }

    /// Integration axes for a box `center ± half_width`, clipped to hard bounds.
    pub fn axes_around(&self, center: &[f64], half_width: &[f64]) -> Vec<Axis> {
        self.intervals
            .iter()
            .enumerate()
            .map(|(k, iv)| {
                let (lo, hi) = (center[k] - half_width[k], center[k] + half_width[k]);
                if iv.effective {
                    Axis::open(lo, hi)
                } else {
                    Axis {
                        lo: lo.max(iv.lo),
                        hi: hi.min(iv.hi),
                        hard_lo: iv.lo,
                        hard_hi: iv.hi,
                    }
                }
            })
            .collect()
    }
}

/// Model given by two scalar functions over a box.
///
/// Both functions must be callable concurrently from several threads.
#[derive(Clone)]
pub struct GenericModel {
    dim: usize,
    log_lik: ScalarFn,
    regularizer: ScalarFn,
    support: Support,
}

impl fmt::Debug for GenericModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericModel")
            .field("dim", &self.dim)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl GenericModel {
    pub fn new(dim: usize, log_lik: ScalarFn, regularizer: ScalarFn, support: Support) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("model dimension must be positive".into()));
        }
        if support.dim() != dim {
            return Err(Error::DimensionMismatch {
                what: "support dimension",
                expected: dim,
                got: support.dim(),
            });
        }
        Ok(Self {
            dim,
            log_lik,
            regularizer,
            support,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn log_lik(&self, theta: &[f64]) -> f64 {
        (self.log_lik)(theta)
    }

    pub fn regularizer(&self, theta: &[f64]) -> f64 {
        (self.regularizer)(theta)
    }

    /// Penalized log-likelihood `log f(θ) - R(θ)`; `-inf` outside hard bounds.
    pub fn objective(&self, theta: &[f64]) -> f64 {
        if !self.support.contains(theta) {
            return f64::NEG_INFINITY;
        }
        self.log_lik(theta) - self.regularizer(theta)
    }

    /// Normalized log prior density `-R(θ) - log Z_R`.
    pub fn log_prior(&self, theta: &[f64], prior: &NormalizedPrior) -> f64 {
        if !self.support.contains(theta) {
            return f64::NEG_INFINITY;
        }
        -self.regularizer(theta) - prior.log_norm_const
    }

    /// Same model with a constant added to the log-likelihood.
    pub fn shifted(&self, constant: f64) -> Self {
        let inner = Arc::clone(&self.log_lik);
        Self {
            log_lik: Arc::new(move |t: &[f64]| inner(t) + constant),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMethod {
    GridQuadrature,
    ClosedForm,
}

/// `π(θ) = exp(-R(θ)) / Z_R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedPrior {
    pub log_norm_const: f64,
    pub method: NormalizationMethod,
    pub err_estimate: f64,
}

impl NormalizedPrior {
    pub fn closed_form(log_norm_const: f64) -> Self {
        Self {
            log_norm_const,
            method: NormalizationMethod::ClosedForm,
            err_estimate: 0.0,
        }
    }
}

/// Computes `log Z_R` with the log-space trapezoid rule over the support
/// (open coordinates widened as needed). Fails when the Richardson error
/// estimate exceeds `tolerance`.
pub fn normalize_prior(
    model: &GenericModel,
    grid_points_per_dim: usize,
    tolerance: f64,
) -> Result<NormalizedPrior> {
    if model.dim > 3 {
        return Err(Error::Unsupported {
            estimator: "grid-quadrature",
            reason: format!("dimension {} exceeds 3", model.dim),
        });
    }
    let integrand = |t: &[f64]| -model.regularizer(t);
    let grid = log_trapezoid(&integrand, &model.support.axes(), grid_points_per_dim)?;
    if grid.err_estimate > tolerance {
        return Err(Error::AccuracyFailure {
            fine: grid.log_value,
            coarse: grid.log_coarse,
            err_estimate: grid.err_estimate,
            tolerance,
        });
    }
    Ok(NormalizedPrior {
        log_norm_const: grid.log_value,
        method: NormalizationMethod::GridQuadrature,
        err_estimate: grid.err_estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapEstimate {
    pub theta: Vec<f64>,
    /// `log f(θ̂) - R(θ̂)`.
    pub objective: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Components of the gradient that can still move the iterate (bound-active
/// components pushing outward are dropped).
fn projected_gradient(support: &Support, theta: &[f64], grad: &[f64]) -> Vec<f64> {
    grad.iter()
        .zip(theta)
        .zip(support.intervals())
        .map(|((&g, &t), iv)| {
            if !iv.effective && ((t <= iv.lo && g < 0.0) || (t >= iv.hi && g > 0.0)) {
                0.0
            } else {
                g
            }
        })
        .collect()
}

/// Moves the finite-difference stencil center inside hard bounds so every
/// probe stays in the support.
fn stencil_center(support: &Support, theta: &[f64], rel_step: f64) -> Vec<f64> {
    theta
        .iter()
        .zip(support.intervals())
        .map(|(&t, iv)| {
            let h = rel_step * (1.0 + t.abs());
            if iv.effective || iv.hi - iv.lo <= 2.0 * h {
                t
            } else {
                t.clamp(iv.lo + h, iv.hi - h)
            }
        })
        .collect()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn free_coordinates(support: &Support, theta: &[f64]) -> Vec<usize> {
    (0..theta.len())
        .filter(|&k| {
            let iv = support.intervals()[k];
            iv.effective || (theta[k] > iv.lo && theta[k] < iv.hi)
        })
        .collect()
}

/// Newton direction on the free coordinates, damped until `-H` is positive definite.
fn newton_direction(hess: &DMatrix<f64>, grad: &[f64], free: &[usize]) -> Option<Vec<f64>> {
    if free.is_empty() {
        return None;
    }
    let m = free.len();
    let neg_h = DMatrix::from_fn(m, m, |i, j| -hess[(free[i], free[j])]);
    let g = DVector::from_fn(m, |i, _| grad[free[i]]);
    if neg_h.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let scale = neg_h.diagonal().abs().max().max(1e-12);
    let mut damping = 0.0;
    for _ in 0..30 {
        let mut a = neg_h.clone();
        for i in 0..m {
            a[(i, i)] += damping;
        }
        if let Some(chol) = a.cholesky() {
            let step = chol.solve(&g);
            let mut full = vec![0.0; grad.len()];
            for (i, &k) in free.iter().enumerate() {
                full[k] = step[i];
            }
            return Some(full);
        }
        damping = if damping == 0.0 { 1e-8 * scale } else { damping * 10.0 };
    }
    None
}

fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-12 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// One sweep of coordinate-wise golden-section maximization.
fn coordinate_sweep(model: &GenericModel, theta: &mut [f64]) {
    for k in 0..theta.len() {
        let iv = model.support.intervals()[k];
        let (lo, hi) = if iv.effective {
            let w = (iv.hi - iv.lo).max(1.0);
            (theta[k].min(iv.lo) - w, theta[k].max(iv.hi) + w)
        } else {
            (iv.lo, iv.hi)
        };
        let mut probe = theta.to_vec();
        let best = golden_section(
            |v| {
                probe[k] = v;
                model.objective(&probe)
            },
            lo,
            hi,
        );
        let mut candidate = theta.to_vec();
        candidate[k] = best;
        if model.objective(&candidate) > model.objective(theta) {
            theta[k] = best;
        }
    }
}

/// Local maximizer of `log f(θ) - R(θ)` by safeguarded Newton with
/// backtracking, finite-difference derivatives and projection onto the
/// box; falls back to coordinate-wise golden-section search when the
/// Newton step makes no progress.
pub fn map_optimize(model: &GenericModel, start: &[f64]) -> Result<MapEstimate> {
    if start.len() != model.dim {
        return Err(Error::DimensionMismatch {
            what: "start length",
            expected: model.dim,
            got: start.len(),
        });
    }
    let objective = |t: &[f64]| model.objective(t);
    let mut theta = start.to_vec();
    model.support.project(&mut theta);
    let mut value = objective(&theta);
    if !value.is_finite() {
        return Err(Error::InvalidInput(format!(
            "objective is not finite at the start point {theta:?}"
        )));
    }
    let mut grad_norm = f64::INFINITY;
    let mut stalls = 0;
    for iteration in 0..MAX_ITERATIONS {
        let grad = fd_gradient(
            &objective,
            &stencil_center(&model.support, &theta, GRADIENT_STEP),
            GRADIENT_STEP,
        );
        let pgrad = projected_gradient(&model.support, &theta, &grad);
        grad_norm = sup_norm(&pgrad);
        let free = free_coordinates(&model.support, &theta);
        let hess = fd_hessian(
            &objective,
            &stencil_center(&model.support, &theta, HESSIAN_STEP),
            HESSIAN_STEP,
        );

        if grad_norm < GRADIENT_TOLERANCE {
            match ascent_from_saddle(model, &theta, &hess, &free) {
                None => {
                    return Ok(MapEstimate {
                        theta,
                        objective: value,
                        iterations: iteration,
                        grad_norm,
                    })
                }
                Some((t, v)) => {
                    theta = t;
                    value = v;
                    continue;
                }
            }
        }

        let mut moved = false;
        if let Some(step) = newton_direction(&hess, &pgrad, &free) {
            let mut t = 1.0;
            for _ in 0..50 {
                let mut trial: Vec<f64> = theta.iter().zip(&step).map(|(x, s)| x + t * s).collect();
                model.support.project(&mut trial);
                let slope: f64 = trial
                    .iter()
                    .zip(&theta)
                    .zip(&pgrad)
                    .map(|((a, b), g)| (a - b) * g)
                    .sum();
                let v = objective(&trial);
                if v.is_finite() && v >= value + 1e-4 * slope.max(0.0) && trial != theta {
                    moved = v > value || grad_norm > GRADIENT_TOLERANCE;
                    theta = trial;
                    value = v;
                    break;
                }
                t *= 0.5;
            }
        }
        if !moved {
            let before = value;
            coordinate_sweep(model, &mut theta);
            value = objective(&theta);
            if value <= before {
                stalls += 1;
                if stalls >= 3 {
                    break;
                }
            } else {
                stalls = 0;
            }
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: MAX_ITERATIONS,
        best: theta,
        best_value: value,
        grad_norm,
    })
}

/// At a stationary point, returns an improved iterate if the Hessian has a
/// direction of positive curvature beyond tolerance; `None` when the point
/// is a local maximum.
fn ascent_from_saddle(
    model: &GenericModel,
    theta: &[f64],
    hess: &DMatrix<f64>,
    free: &[usize],
) -> Option<(Vec<f64>, f64)> {
    if free.is_empty() {
        return None;
    }
    let m = free.len();
    let sub = DMatrix::from_fn(m, m, |i, j| hess[(free[i], free[j])]);
    let eig = SymmetricEigen::new(sub);
    let scale = eig.eigenvalues.abs().max().max(1.0);
    let (idx, top) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if top <= HESSIAN_TOLERANCE * scale {
        return None;
    }
    let base = model.objective(theta);
    let dir = eig.eigenvectors.column(idx);
    for sign in [1.0, -1.0] {
        let mut t = 1.0;
        for _ in 0..40 {
            let mut trial = theta.to_vec();
            for (i, &k) in free.iter().enumerate() {
                trial[k] += sign * t * dir[i];
            }
            model.support.project(&mut trial);
            let v = model.objective(&trial);
            if v > base {
                return Some((trial, v));
            }
            t *= 0.5;
        }
    }
    None
}

/// A distinct local maximum found by the multistart search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Basin {
    pub theta: Vec<f64>,
    pub objective: f64,
    pub hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultistartResult {
    pub best: MapEstimate,
    pub basins: Vec<Basin>,
    pub failures: usize,
}

/// Latin-hypercube starts over the support box, one stream per `seed`.
pub fn latin_hypercube(support: &Support, starts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng::stream(seed, 0);
    let d = support.dim();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(d);
    for iv in support.intervals() {
        let mut strata: Vec<usize> = (0..starts).collect();
        strata.shuffle(&mut rng);
        columns.push(
            strata
                .into_iter()
                .map(|s| {
                    let u: f64 = rng.random();
                    iv.lo + (iv.hi - iv.lo) * (s as f64 + u) / starts as f64
                })
                .collect(),
        );
    }
    (0..starts).map(|i| (0..d).map(|k| columns[k][i]).collect()).collect()
}

/// Runs `map_optimize` from `starts` Latin-hypercube points and keeps the best,
/// recording every distinct basin.
pub fn map_multistart(model: &GenericModel, starts: usize, seed: u64) -> Result<MultistartResult> {
    let starts = starts.max(1);
    let points = latin_hypercube(&model.support, starts, seed);
    let mut basins: Vec<Basin> = Vec::new();
    let mut best: Option<MapEstimate> = None;
    let mut failures = 0;
    let mut last_err = None;
    for p in points {
        match map_optimize(model, &p) {
            Ok(est) => {
                let tol = 1e-4 * (1.0 + sup_norm(&est.theta));
                if let Some(b) = basins.iter_mut().find(|b| {
                    b.theta.iter().zip(&est.theta).all(|(a, c)| (a - c).abs() < tol)
                }) {
                    b.hits += 1;
                } else {
                    basins.push(Basin {
                        theta: est.theta.clone(),
                        objective: est.objective,
                        hits: 1,
                    });
                }
                if best.as_ref().is_none_or(|b| est.objective > b.objective) {
                    best = Some(est);
                }
            }
            Err(e) => {
                failures += 1;
                last_err = Some(e);
            }
        }
    }
    match best {
        Some(best) => Ok(MultistartResult {
            best,
            basins,
            failures,
        }),
        None => Err(last_err.expect("at least one start")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_model() -> GenericModel {
        GenericModel::new(
            1,
            Arc::new(|t: &[f64]| -(t[0] - 3.0).powi(2) / 2.0),
            Arc::new(|t: &[f64]| t[0] * t[0] / 2.0),
            Support::effective(vec![(-10.0, 10.0)]),
        )
        .unwrap()
    }

    #[test]
    fn two_quadratics_meet_halfway() {
        let est = map_optimize(&quad_model(), &[0.0]).unwrap();
        assert!((est.theta[0] - 1.5).abs() < 1e-8);
        assert!(est.grad_norm < GRADIENT_TOLERANCE);
    }

    #[test]
    fn constant_shift_does_not_move_the_map() {
        let m = quad_model();
        let a = map_optimize(&m, &[-4.0]).unwrap();
        let b = map_optimize(&m.shifted(123.456), &[-4.0]).unwrap();
        assert!((a.theta[0] - b.theta[0]).abs() < 1e-6);
    }

    #[test]
    fn bound_active_maximum() {
        let m = GenericModel::new(
            1,
            Arc::new(|t: &[f64]| 2.0 * t[0]),
            Arc::new(|_: &[f64]| 0.0),
            Support::bounded(vec![(0.0, 1.0)]),
        )
        .unwrap();
        let est = map_optimize(&m, &[0.3]).unwrap();
        assert!((est.theta[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_smooth_objective_uses_fallback() {
        // Newton sees zero curvature on |θ - 0.7|; golden-section finishes the job.
        let m = GenericModel::new(
            1,
            Arc::new(|t: &[f64]| -(t[0] - 0.7).abs()),
            Arc::new(|_: &[f64]| 0.0),
            Support::bounded(vec![(-2.0, 2.0)]),
        )
        .unwrap();
        match map_optimize(&m, &[-1.5]) {
            Ok(est) => assert!((est.theta[0] - 0.7).abs() < 1e-5),
            Err(Error::ConvergenceFailure { best, .. }) => assert!((best[0] - 0.7).abs() < 1e-5),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn unbounded_objective_fails_to_converge() {
        let m = GenericModel::new(
            1,
            Arc::new(|t: &[f64]| t[0]),
            Arc::new(|_: &[f64]| 0.0),
            Support::effective(vec![(-1.0, 1.0)]),
        )
        .unwrap();
        assert!(matches!(
            map_optimize(&m, &[0.0]),
            Err(Error::ConvergenceFailure { .. })
        ));
    }

    #[test]
    fn saddle_start_escapes() {
        // stationary at the origin but a saddle; maxima at (±1, 0)
        let m = GenericModel::new(
            2,
            Arc::new(|t: &[f64]| 0.5 * t[0] * t[0] - 0.25 * t[0].powi(4) - t[1] * t[1]),
            Arc::new(|_: &[f64]| 0.0),
            Support::effective(vec![(-3.0, 3.0); 2]),
        )
        .unwrap();
        let est = map_optimize(&m, &[0.0, 0.0]).unwrap();
        assert!((est.theta[0].abs() - 1.0).abs() < 1e-6, "{:?}", est.theta);
    }

    #[test]
    fn multistart_records_both_basins() {
        let m = GenericModel::new(
            1,
            Arc::new(|t: &[f64]| 0.5 * t[0] * t[0] - 0.25 * t[0].powi(4) + 0.1 * t[0]),
            Arc::new(|_: &[f64]| 0.0),
            Support::effective(vec![(-2.0, 2.0)]),
        )
        .unwrap();
        let res = map_multistart(&m, DEFAULT_MULTISTARTS, 4).unwrap();
        assert_eq!(res.basins.len(), 2);
        assert!(res.best.theta[0] > 0.0);
        assert_eq!(res.basins.iter().map(|b| b.hits).sum::<usize>(), 8);
    }

    #[test]
    fn latin_hypercube_stratifies() {
        let s = Support::bounded(vec![(0.0, 8.0), (-1.0, 1.0)]);
        let pts = latin_hypercube(&s, 8, 1);
        let mut cells: Vec<usize> = pts.iter().map(|p| p[0].floor() as usize).collect();
        cells.sort();
        assert_eq!(cells, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn prior_normalization_closed_forms() {
        let gauss = GenericModel::new(
            1,
            Arc::new(|_: &[f64]| 0.0),
            Arc::new(|t: &[f64]| t[0] * t[0] / 2.0),
            Support::effective(vec![(-12.0, 12.0)]),
        )
        .unwrap();
        let p = normalize_prior(&gauss, 2001, 1e-6).unwrap();
        assert!((p.log_norm_const - 0.918_938_533_204_672_7).abs() < 1e-8);
        assert_eq!(p.method, NormalizationMethod::GridQuadrature);

        let scaled = GenericModel::new(
            1,
            Arc::new(|_: &[f64]| 0.0),
            Arc::new(|t: &[f64]| 4.0 * t[0] * t[0] / 2.0),
            Support::effective(vec![(-6.0, 6.0)]),
        )
        .unwrap();
        let p = normalize_prior(&scaled, 2001, 1e-6).unwrap();
        assert!((p.log_norm_const - 0.5 * (2.0 * std::f64::consts::PI / 4.0).ln()).abs() < 1e-8);

        let laplace = GenericModel::new(
            1,
            Arc::new(|_: &[f64]| 0.0),
            Arc::new(|t: &[f64]| t[0].abs()),
            Support::bounded(vec![(-30.0, 30.0)]),
        )
        .unwrap();
        let p = normalize_prior(&laplace, 60_001, 1e-6).unwrap();
        assert!((p.log_norm_const - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn coarse_prior_grid_fails_tolerance() {
        let laplace = GenericModel::new(
            1,
            Arc::new(|_: &[f64]| 0.0),
            Arc::new(|t: &[f64]| t[0].abs()),
            Support::bounded(vec![(-30.0, 30.0)]),
        )
        .unwrap();
        let err = normalize_prior(&laplace, 101, 1e-6).unwrap_err();
        assert!(matches!(err, Error::AccuracyFailure { fine, coarse, .. } if fine != coarse));
    }

    #[test]
    fn prior_normalization_rejects_high_dimension() {
        let m = GenericModel::new(
            4,
            Arc::new(|_: &[f64]| 0.0),
            Arc::new(|_: &[f64]| 0.0),
            Support::bounded(vec![(0.0, 1.0); 4]),
        )
        .unwrap();
        assert!(matches!(normalize_prior(&m, 11, 1.0), Err(Error::Unsupported { .. })));
    }
}
