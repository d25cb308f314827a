use serde::Serialize;

use crate::error::{Error, Result};

/// BIC penalty `(d/2) log n`.
pub fn bic_penalty(d: usize, n: usize) -> f64 {
    0.5 * d as f64 * (n as f64).ln()
}

/// Penalty on log-evidence implied by penalizing log-likelihood with
/// `supplied_penalty`: `pen' = supplied_penalty - flexibility`.
pub fn pen_prime(supplied_penalty: f64, flexibility: f64) -> f64 {
    supplied_penalty - flexibility
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenaltyComparison {
    pub flexibility: f64,
    pub bic_penalty: f64,
    pub supplied_penalty: f64,
    pub pen_prime: f64,
    pub d: usize,
    pub n: usize,
}

impl PenaltyComparison {
    pub fn new(flexibility: f64, supplied_penalty: f64, d: usize, n: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::InvalidInput("d and n must be positive".into()));
        }
        if !flexibility.is_finite() || !supplied_penalty.is_finite() {
            return Err(Error::InvalidInput("penalties must be finite".into()));
        }
        Ok(Self {
            flexibility,
            bic_penalty: bic_penalty(d, n),
            supplied_penalty,
            pen_prime: pen_prime(supplied_penalty, flexibility),
            d,
            n,
        })
    }

    /// Uses the BIC penalty as the supplied penalty.
    pub fn against_bic(flexibility: f64, d: usize, n: usize) -> Result<Self> {
        Self::new(flexibility, bic_penalty(d, n), d, n)
    }
}
