use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evidence::{EstimatorRegistry, EstimatorSettings, EvidenceDecomposition, EvidenceTarget};
use crate::glm::ObservationSet;

use super::{Member, ModelSet};

/// Scores closer than this to the maximum count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionRule {
    /// argmax of `log E_i`.
    MaxEvidence,
    /// argmax of `log w_i + log E_i`, the Bayes rule under zero-one loss.
    MaxPosterior,
}

impl SelectionRule {
    pub const ALL: [SelectionRule; 2] = [SelectionRule::MaxEvidence, SelectionRule::MaxPosterior];

    pub fn as_str(&self) -> &'static str {
        match self {
            SelectionRule::MaxEvidence => "max-evidence",
            SelectionRule::MaxPosterior => "max-posterior",
        }
    }
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SelectionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-evidence" => Ok(SelectionRule::MaxEvidence),
            "max-posterior" => Ok(SelectionRule::MaxPosterior),
            other => Err(Error::InvalidInput(format!(
                "unknown selection rule '{other}' (expected max-evidence or max-posterior)"
            ))),
        }
    }
}

/// Which estimator computes each member's evidence.
#[derive(Clone)]
pub struct SelectionConfig {
    pub registry: EstimatorRegistry,
    /// Forces one estimator for every member; otherwise Gaussian members use
    /// `glm-exact` and generic members `laplace`.
    pub estimator: Option<String>,
    pub settings: EstimatorSettings,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            registry: EstimatorRegistry::builtin(),
            estimator: None,
            settings: EstimatorSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionOutcome {
    pub chosen: usize,
    pub rule: SelectionRule,
    pub log_scores: Vec<f64>,
    pub tie_broken: bool,
    pub evidence: Vec<EvidenceDecomposition>,
}

/// Index of the maximum, preferring the lowest index among scores within
/// [`TIE_TOLERANCE`] of it; the flag reports whether such a tie occurred.
pub fn argmax_lowest_index(scores: &[f64]) -> (usize, bool) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut tied = scores
        .iter()
        .enumerate()
        .filter(|(_, s)| **s >= max - TIE_TOLERANCE)
        .map(|(i, _)| i);
    let first = tied.next().unwrap_or(0);
    (first, tied.next().is_some())
}

pub fn member_evidence(
    member: &Member,
    obs: &ObservationSet,
    config: &SelectionConfig,
) -> Result<EvidenceDecomposition> {
    match member {
        Member::Gaussian(spec) => {
            let name = config.estimator.as_deref().unwrap_or("glm-exact");
            config
                .registry
                .estimate(name, &EvidenceTarget::Gaussian { spec, obs }, &config.settings)
        }
        Member::Generic(build) => {
            let (model, prior) = build(obs)?;
            let name = config.estimator.as_deref().unwrap_or("laplace");
            let target = EvidenceTarget::Generic {
                model: &model,
                prior: prior.as_ref(),
            };
            config.registry.estimate(name, &target, &config.settings)
        }
    }
}

pub fn select(
    set: &ModelSet,
    obs: &ObservationSet,
    rule: SelectionRule,
    config: &SelectionConfig,
) -> Result<SelectionOutcome> {
    let evidence = set
        .members()
        .iter()
        .enumerate()
        .map(|(index, m)| {
            member_evidence(m, obs, config).map_err(|e| Error::MemberFailed {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(select_from_evidence(set, evidence, rule))
}

pub(crate) fn select_from_evidence(
    set: &ModelSet,
    evidence: Vec<EvidenceDecomposition>,
    rule: SelectionRule,
) -> SelectionOutcome {
    let log_scores: Vec<f64> = evidence
        .iter()
        .zip(set.weights())
        .map(|(e, w)| match rule {
            SelectionRule::MaxEvidence => e.log_evidence,
            SelectionRule::MaxPosterior => w.ln() + e.log_evidence,
        })
        .collect();
    let (chosen, tie_broken) = argmax_lowest_index(&log_scores);
    SelectionOutcome {
        chosen,
        rule,
        log_scores,
        tie_broken,
        evidence,
    }
}
