//! Composite trapezoid integration of `exp(log_integrand)` over a box, in
//! log-sum-exp arithmetic, with a half-resolution companion for error
//! estimation and automatic widening of open faces.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::LogSumExp;

/// Open faces are widened until the boundary integrand is below this fraction of the peak.
pub const BOUNDARY_MASS_RATIO: f64 = 1e-12;
pub const MAX_DOUBLINGS: usize = 6;

/// One integration axis. `hard_lo`/`hard_hi` are the limits of the true
/// support (infinite when unbounded); a face strictly inside them is open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub hard_lo: f64,
    pub hard_hi: f64,
}

impl Axis {
    pub fn fixed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            hard_lo: lo,
            hard_hi: hi,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            hard_lo: f64::NEG_INFINITY,
            hard_hi: f64::INFINITY,
        }
    }

    fn lo_open(&self) -> bool {
        self.lo > self.hard_lo
    }

    fn hi_open(&self) -> bool {
        self.hi < self.hard_hi
    }

    fn widened(&self) -> Self {
        let center = 0.5 * (self.lo + self.hi);
        let width = self.hi - self.lo;
        Self {
            lo: if self.lo_open() { (center - width).max(self.hard_lo) } else { self.lo },
            hi: if self.hi_open() { (center + width).min(self.hard_hi) } else { self.hi },
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridIntegral {
    /// Log of the integral at full resolution.
    pub log_value: f64,
    /// Log of the integral on every other node.
    pub log_coarse: f64,
    /// Richardson estimate of the full-resolution error, on the log scale.
    pub err_estimate: f64,
    pub axes: Vec<Axis>,
    pub points_per_dim: usize,
    pub doublings: usize,
}

#[derive(Clone, Copy)]
struct Partial {
    fine: LogSumExp,
    coarse: LogSumExp,
    peak: f64,
    open_boundary_peak: f64,
}

impl Partial {
    fn new() -> Self {
        Self {
            fine: LogSumExp::new(),
            coarse: LogSumExp::new(),
            peak: f64::NEG_INFINITY,
            open_boundary_peak: f64::NEG_INFINITY,
        }
    }

    fn merge(&mut self, other: &Partial) {
        self.fine.push(other.fine.value());
        self.coarse.push(other.coarse.value());
        self.peak = self.peak.max(other.peak);
        self.open_boundary_peak = self.open_boundary_peak.max(other.open_boundary_peak);
    }
}

/// Integrates `exp(log_integrand)` over the box spanned by `axes` with
/// `points_per_dim` nodes per axis. Even node counts are rounded up to the
/// next odd number so the half-resolution grid shares nodes with the fine one.
pub fn log_trapezoid(
    log_integrand: &(dyn Fn(&[f64]) -> f64 + Sync),
    axes: &[Axis],
    points_per_dim: usize,
) -> Result<GridIntegral> {
    if axes.is_empty() {
        return Err(Error::InvalidInput("integration box has no axes".into()));
    }
    let points = (points_per_dim.max(3)) | 1;
    let mut axes = axes.to_vec();
    for a in &axes {
        if !(a.lo.is_finite() && a.hi.is_finite() && a.lo < a.hi) {
            return Err(Error::InvalidInput(format!(
                "integration interval [{}, {}] is not a finite non-empty range",
                a.lo, a.hi
            )));
        }
    }
    let mut doublings = 0;
    loop {
        let partial = sweep(log_integrand, &axes, points)?;
        if partial.peak == f64::NEG_INFINITY {
            return Err(Error::NumericFailure(
                "integrand is zero on every grid node".into(),
            ));
        }
        let truncated = partial.open_boundary_peak - partial.peak > BOUNDARY_MASS_RATIO.ln();
        if truncated {
            if doublings == MAX_DOUBLINGS {
                return Err(Error::Truncation { doublings });
            }
            axes = axes.iter().map(Axis::widened).collect();
            doublings += 1;
            continue;
        }
        let log_cell: f64 = axes
            .iter()
            .map(|a| ((a.hi - a.lo) / (points - 1) as f64).ln())
            .sum();
        let log_value = partial.fine.value() + log_cell;
        let log_coarse = partial.coarse.value() + log_cell + axes.len() as f64 * 2f64.ln();
        return Ok(GridIntegral {
            log_value,
            log_coarse,
            err_estimate: (log_value - log_coarse).abs() / 3.0,
            axes,
            points_per_dim: points,
            doublings,
        });
    }
}

fn sweep(
    log_integrand: &(dyn Fn(&[f64]) -> f64 + Sync),
    axes: &[Axis],
    points: usize,
) -> Result<Partial> {
    let d = axes.len();
    let nodes: Vec<Vec<f64>> = axes
        .iter()
        .map(|a| {
            let h = (a.hi - a.lo) / (points - 1) as f64;
            (0..points)
                .map(|i| if i == points - 1 { a.hi } else { a.lo + h * i as f64 })
                .collect()
        })
        .collect();
    let end_weight = 0.5f64.ln();
    let inner = points.pow((d - 1) as u32);

    let slices: Vec<Result<Partial>> = (0..points)
        .into_par_iter()
        .map(|first| {
            let mut part = Partial::new();
            let mut idx = vec![0usize; d];
            idx[0] = first;
            let mut theta = vec![0.0; d];
            for flat in 0..inner {
                let mut rem = flat;
                for k in (1..d).rev() {
                    idx[k] = rem % points;
                    rem /= points;
                }
                let mut log_w_fine = 0.0;
                let mut log_w_coarse = 0.0;
                let mut on_coarse = true;
                let mut on_open_face = false;
                for k in 0..d {
                    let i = idx[k];
                    theta[k] = nodes[k][i];
                    let edge = i == 0 || i == points - 1;
                    if edge {
                        log_w_fine += end_weight;
                        log_w_coarse += end_weight;
                    }
                    on_coarse &= i % 2 == 0;
                    if (i == 0 && axes[k].lo_open()) || (i == points - 1 && axes[k].hi_open()) {
                        on_open_face = true;
                    }
                }
                let v = log_integrand(&theta);
                if v.is_nan() || v == f64::INFINITY {
                    return Err(Error::NumericFailure(format!(
                        "log integrand is {v} at {theta:?}"
                    )));
                }
                part.fine.push(v + log_w_fine);
                if on_coarse {
                    part.coarse.push(v + log_w_coarse);
                }
                part.peak = part.peak.max(v);
                if on_open_face {
                    part.open_boundary_peak = part.open_boundary_peak.max(v);
                }
            }
            Ok(part)
        })
        .collect();

    let mut total = Partial::new();
    for s in slices {
        total.merge(&s?);
    }
    Ok(total)
}
