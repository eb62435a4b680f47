//! Rate functions `λ = ρ_m · exp(Σ_q α_q s_q)`.

use serde::{Deserialize, Serialize};

use super::spec::{BehaviorRateEffect, EffectSpec, NetworkRateEffect, ParameterVector};
use super::stats::SimilarityContext;
use crate::dgp::WaveState;
#[allow(unused_imports)]
use num_traits::Float;

/// Rate exponents are clamped to `±MAX_RATE_EXPONENT`.
pub const MAX_RATE_EXPONENT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Network,
    Behavior,
}

/// A rate value, and whether its exponent hit the clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub value: f64,
    pub clamped: bool,
}

pub fn network_rate_statistic(effect: NetworkRateEffect, state: &WaveState, ctx: &SimilarityContext, i: usize) -> f64 {
    match effect {
        NetworkRateEffect::LogOutdegree => (state.graph.degree(i) as f64 + 1.0).ln(),
        NetworkRateEffect::BehaviorOnNetRate => state.behavior[i] as f64,
        NetworkRateEffect::PriceOnNetRate => state.price[i] - ctx.price_mean,
    }
}

pub fn behavior_rate_statistic(effect: BehaviorRateEffect, state: &WaveState, ctx: &SimilarityContext, i: usize) -> f64 {
    match effect {
        BehaviorRateEffect::PriceOnBehRate => state.price[i] - ctx.price_mean,
    }
}

/// Rate of actor `i` for `variable` in `period`, with clamp diagnostics.
pub fn rate_checked(
    i: usize,
    state: &WaveState,
    params: &ParameterVector,
    spec: &EffectSpec,
    ctx: &SimilarityContext,
    variable: Variable,
    period: usize,
) -> Rate {
    let (rho, exponent) = match variable {
        Variable::Network => (
            params.rho_net[period],
            spec.network_rate_effects
                .iter()
                .zip(&params.alpha_net)
                .map(|(&e, a)| a * network_rate_statistic(e, state, ctx, i))
                .sum::<f64>(),
        ),
        Variable::Behavior => (
            params.rho_beh[period],
            spec.behavior_rate_effects
                .iter()
                .zip(&params.alpha_beh)
                .map(|(&e, a)| a * behavior_rate_statistic(e, state, ctx, i))
                .sum::<f64>(),
        ),
    };
    let clamped = exponent.abs() > MAX_RATE_EXPONENT;
    let exponent = exponent.clamp(-MAX_RATE_EXPONENT, MAX_RATE_EXPONENT);
    Rate {
        value: rho * exponent.exp(),
        clamped,
    }
}

pub fn rate(
    i: usize,
    state: &WaveState,
    params: &ParameterVector,
    spec: &EffectSpec,
    ctx: &SimilarityContext,
    variable: Variable,
    period: usize,
) -> f64 {
    rate_checked(i, state, params, spec, ctx, variable, period).value
}
