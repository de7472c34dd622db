//! Bayesian conformity assessment of lots and processes under attributes
//! sampling.
//!
//! A beta prior on the process proportion nonconforming, a single sampling
//! plan (n, c) and an upper tolerance limit determine posterior conformance
//! probabilities and the specific and global consumer's and producer's
//! risks. [`oracle`] holds enumeration and Monte Carlo checks of those
//! formulas.

pub mod conformity;
pub mod distributions;
pub mod error;
pub mod oracle;
pub mod plans;
pub mod prior;
pub mod special;

pub use conformity::{
    AssessmentScenario, ConformityReport, GlobalRisks, OcProbabilities, SpecificRisk, ToleranceSpec,
};
pub use distributions::{BetaBinomial, BetaParams, BivariateBetaBinomial};
pub use error::{Error, Result};
pub use plans::{Aql, SamplingPlan};
pub use prior::{ElicitationSpec, PriorPreset};
