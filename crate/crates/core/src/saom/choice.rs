//! Multinomial logit micro-step choices.
//!
//! Utilities are objective-function differences relative to the current
//! state, which leaves the logit probabilities unchanged.

use alloc::vec::Vec;

use super::spec::{BehaviorEffect, NetworkEffect};
use super::stats::{behavior_statistic_at, network_toggle_delta, SimilarityContext};
use crate::dgp::WaveState;
#[allow(unused_imports)]
use num_traits::Float;

/// Normalised `exp(u)`, computed with the maximum subtracted.
pub fn softmax(utilities: &[f64]) -> Vec<f64> {
    let max = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = utilities.iter().map(|u| (u - max).exp()).collect();
    let total: f64 = p.iter().sum();
    for x in &mut p {
        *x /= total;
    }
    p
}

/// Utility of each network option for actor `i`: entry `j ≠ i` toggles the
/// tie `{i, j}`, entry `i` is the no-change option (utility 0).
pub fn network_utilities(state: &WaveState, ctx: &SimilarityContext, effects: &[NetworkEffect], beta: &[f64], i: usize) -> Vec<f64> {
    (0..state.n())
        .map(|j| {
            if j == i {
                0.0
            } else {
                effects
                    .iter()
                    .zip(beta)
                    .filter(|(_, b)| **b != 0.0)
                    .map(|(&e, b)| b * network_toggle_delta(e, state, ctx, i, j))
                    .sum()
            }
        })
        .collect()
}

/// Choice distribution over network options, laid out as in
/// [`network_utilities`].
pub fn network_choice_probabilities(state: &WaveState, ctx: &SimilarityContext, effects: &[NetworkEffect], beta: &[f64], i: usize) -> Vec<f64> {
    softmax(&network_utilities(state, ctx, effects, beta, i))
}

/// Objective value of actor `i` holding behaviour 0 and 1.
pub fn behavior_utilities(state: &WaveState, ctx: &SimilarityContext, effects: &[BehaviorEffect], beta: &[f64], i: usize) -> [f64; 2] {
    let f = |own: u8| -> f64 {
        effects
            .iter()
            .zip(beta)
            .map(|(&e, b)| b * behavior_statistic_at(e, state, ctx, i, own))
            .sum()
    };
    [f(0), f(1)]
}

/// Probabilities of actor `i` ending the micro-step with behaviour 0 and 1.
pub fn behavior_choice_probabilities(state: &WaveState, ctx: &SimilarityContext, effects: &[BehaviorEffect], beta: &[f64], i: usize) -> [f64; 2] {
    let u = behavior_utilities(state, ctx, effects, beta, i);
    let p = softmax(&u);
    [p[0], p[1]]
}
