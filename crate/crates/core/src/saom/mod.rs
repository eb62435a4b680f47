//! Stochastic actor-oriented co-evolution of an undirected network and a
//! binary behaviour.
//!
//! Network micro-steps use one-sided initiative: actor `i` toggles the
//! unordered pair `{i, j}`. Each observation period lasts one unit of model
//! time.

pub mod choice;
pub mod estimate;
pub mod intensity;
pub mod predict;
pub mod rate;
pub mod simulate;
pub mod spec;
pub mod stats;

pub use choice::{behavior_choice_probabilities, network_choice_probabilities, softmax};
pub use estimate::{
    estimate_mom, estimate_mom_with, BatchRunner, EstimationResult, EstimationSettings, GainSchedule, ParameterRow, PhaseRecord, Sequential, Simulated,
};
pub use intensity::{transition_intensity, TransitionIntensity, MAX_INTENSITY_ACTORS};
pub use predict::predict_future;
pub use rate::{rate, rate_checked, Variable, MAX_RATE_EXPONENT};
pub use simulate::{simulate_period, PeriodOutcome};
pub use spec::{BehaviorEffect, BehaviorRateEffect, EffectSpec, NetworkEffect, NetworkRateEffect, ParamKind, ParameterVector};
pub use stats::{behavior_eval_statistics, network_eval_statistics, Similarity, SimilarityContext};
