//! Choosing one model from a set: selection rules, zero-one risk by
//! simulation, polynomial-degree experiments and the scalar crossover demo.

mod crossover;
mod model_set;
mod poly;
mod risk;
mod select;
mod sweet_spot;

pub use crossover::{mackay_crossover, Crossover, CrossoverReport};
pub use model_set::{GenericBuilder, Member, ModelSet};
pub use poly::{polynomial_design, polynomial_family, PolynomialFamily};
pub use risk::{prior_predictive_draw, risk_mc, RiskReport};
pub use select::{argmax_lowest_index, member_evidence, select, SelectionConfig, SelectionOutcome, SelectionRule, TIE_TOLERANCE};
pub use sweet_spot::{sweet_spot_experiment, SweetSpotConfig, SweetSpotReport};
