//! Bayesian model selection through the exact identity
//! `log E = log f(y; θ̂) - flexibility`, where θ̂ is the MAP (penalized
//! likelihood) estimate and `flexibility = log π*(θ̂) - log π(θ̂)`.
//!
//! * [`glm`]: closed forms for the Gaussian linear model with a ridge prior.
//! * [`generic`]: black-box models, MAP search and prior normalization.
//! * [`evidence`]: named evidence estimators, penalties (BIC, pen′) and the
//!   large-`n` sweep.
//! * [`selection`]: selection rules, risk simulation and demonstrations.

pub mod error;
pub mod evidence;
pub mod generic;
pub mod glm;
pub mod grid;
pub mod numeric;
pub mod rng;
pub mod selection;

pub use error::{Error, Result};
pub use evidence::{
    EstimatorRegistry, EstimatorSettings, EvidenceDecomposition, EvidenceEstimator, EvidenceTarget,
};
pub use generic::{GenericModel, NormalizedPrior, Support};
pub use glm::{GaussianLinearSpec, ObservationSet};
