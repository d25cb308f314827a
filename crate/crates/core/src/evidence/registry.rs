use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generic::{map_multistart, map_optimize, normalize_prior, GenericModel, NormalizedPrior};
use crate::glm::{GaussianLinearSpec, ObservationSet};

use super::{EvidenceDecomposition, GlmExact, ImportanceSampling, Laplace, Quadrature};

/// What an estimator is asked to integrate.
#[derive(Debug, Clone, Copy)]
pub enum EvidenceTarget<'a> {
    Gaussian {
        spec: &'a GaussianLinearSpec,
        obs: &'a ObservationSet,
    },
    Generic {
        model: &'a GenericModel,
        /// Normalizer of `exp(-R)`; computed by grid quadrature when absent.
        prior: Option<&'a NormalizedPrior>,
    },
}

/// Tuning shared by the built-in estimators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSettings {
    pub grid_points: usize,
    /// Grid used by `laplace` to attach an error estimate when d ≤ 3.
    pub check_grid_points: usize,
    pub quadrature_tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    pub inflation: f64,
    /// Number of Latin-hypercube MAP starts; 1 starts at the box center.
    pub starts: usize,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            grid_points: 2001,
            check_grid_points: 101,
            quadrature_tolerance: 1e-3,
            samples: 100_000,
            seed: 0,
            inflation: 1.5,
            starts: 1,
        }
    }
}

/// A way of computing log-evidence.
pub trait EvidenceEstimator: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn estimate(
        &self,
        target: &EvidenceTarget<'_>,
        settings: &EstimatorSettings,
    ) -> Result<EvidenceDecomposition>;
}

/// Estimators keyed by name.
#[derive(Clone, Default)]
pub struct EstimatorRegistry {
    entries: BTreeMap<&'static str, Arc<dyn EvidenceEstimator>>,
}

impl EstimatorRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The four built-in estimators.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(GlmExact));
        r.register(Arc::new(Quadrature));
        r.register(Arc::new(Laplace));
        r.register(Arc::new(ImportanceSampling));
        r
    }

    /// Adds an estimator, replacing any previous one with the same name.
    pub fn register(&mut self, estimator: Arc<dyn EvidenceEstimator>) {
        self.entries.insert(estimator.name(), estimator);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn EvidenceEstimator>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownEstimator(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn estimate(
        &self,
        name: &str,
        target: &EvidenceTarget<'_>,
        settings: &EstimatorSettings,
    ) -> Result<EvidenceDecomposition> {
        self.get(name)?.estimate(target, settings)
    }
}

/// Generic view of a target: the black-box model plus its normalized prior.
pub(crate) fn resolve_generic(
    target: &EvidenceTarget<'_>,
    settings: &EstimatorSettings,
) -> Result<(GenericModel, NormalizedPrior)> {
    match *target {
        EvidenceTarget::Gaussian { spec, obs } => Ok((spec.to_generic(obs)?, spec.normalized_prior())),
        EvidenceTarget::Generic { model, prior } => {
            let prior = match prior {
                Some(p) => p.clone(),
                None => normalize_prior(model, settings.grid_points, settings.quadrature_tolerance)?,
            };
            Ok((model.clone(), prior))
        }
    }
}

/// MAP used by the generic estimators, with a note when several basins exist.
pub(crate) fn locate_map(
    model: &GenericModel,
    settings: &EstimatorSettings,
) -> Result<(Vec<f64>, Vec<String>)> {
    if settings.starts <= 1 {
        let est = map_optimize(model, &model.support().center())?;
        return Ok((est.theta, Vec::new()));
    }
    let res = map_multistart(model, settings.starts, settings.seed)?;
    let mut notes = Vec::new();
    if res.basins.len() > 1 {
        notes.push(format!(
            "{} local maxima found from {} starts; best kept",
            res.basins.len(),
            settings.starts
        ));
    }
    Ok((res.best.theta, notes))
}
