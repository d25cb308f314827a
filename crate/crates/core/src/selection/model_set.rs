use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generic::{GenericModel, NormalizedPrior};
use crate::glm::{GaussianLinearSpec, ObservationSet};

/// Builds a black-box model for a particular observation set.
pub type GenericBuilder =
    Arc<dyn Fn(&ObservationSet) -> Result<(GenericModel, Option<NormalizedPrior>)> + Send + Sync>;

#[derive(Clone)]
pub enum Member {
    Gaussian(GaussianLinearSpec),
    Generic(GenericBuilder),
}

impl fmt::Debug for Member {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Member::Gaussian(spec) => f.debug_tuple("Gaussian").field(spec).finish(),
            Member::Generic(_) => f.write_str("Generic(..)"),
        }
    }
}

/// Ordered candidate models with prior model probabilities.
#[derive(Debug, Clone)]
pub struct ModelSet {
    members: Vec<Member>,
    weights: Vec<f64>,
    labels: Vec<String>,
}

impl ModelSet {
    /// Uniform prior weights.
    pub fn uniform(members: Vec<Member>) -> Result<Self> {
        let k = members.len();
        if k == 0 {
            return Err(Error::InvalidInput("model set is empty".into()));
        }
        Self::weighted(members, vec![1.0 / k as f64; k])
    }

    pub fn weighted(members: Vec<Member>, weights: Vec<f64>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInput("model set is empty".into()));
        }
        if weights.len() != members.len() {
            return Err(Error::DimensionMismatch {
                what: "weight count",
                expected: members.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidInput("model weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "model weights must sum to 1, got {total}"
            )));
        }
        let labels = (0..members.len()).map(|i| format!("model-{i}")).collect();
        Ok(Self {
            members,
            weights,
            labels,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.members.len() {
            return Err(Error::DimensionMismatch {
                what: "label count",
                expected: self.members.len(),
                got: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    /// Replaces the weights with `raw / sum(raw)`.
    pub fn with_normalized_weights(self, raw: Vec<f64>) -> Result<Self> {
        let total: f64 = raw.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidInput("model weights must be positive".into()));
        }
        let labels = self.labels.clone();
        Self::weighted(self.members, raw.iter().map(|w| w / total).collect())?.with_labels(labels)
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
