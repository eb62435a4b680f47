//! Per-actor effect statistics.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::spec::{BehaviorEffect, NetworkEffect};
use crate::dgp::WaveState;
use crate::graph::Graph;

/// Range normalisation and centring for one covariate's similarity scores
/// `sim_ij = (Δ - |v_i - v_j|) / Δ` (defined as 1 for every pair when Δ = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub range: f64,
    pub mean: f64,
}

impl Similarity {
    #[inline]
    pub fn sim(&self, a: f64, b: f64) -> f64 {
        if self.range > 0.0 {
            (self.range - (a - b).abs()) / self.range
        } else {
            1.0
        }
    }

    #[inline]
    pub fn centered(&self, a: f64, b: f64) -> f64 {
        self.sim(a, b) - self.mean
    }

    /// Range and mean pairwise similarity of a single observation.
    pub fn of_values(values: &[f64]) -> Self {
        Self::pooled(&[values])
    }

    /// Range over all observations, mean similarity over all pairs of all
    /// observations.
    pub fn pooled(observations: &[&[f64]]) -> Self {
        let range = observations
            .iter()
            .map(|v| {
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if v.is_empty() { 0.0 } else { hi - lo }
            })
            .fold(0.0, f64::max);
        let mut s = Similarity { range, mean: 0.0 };
        let mut total = 0.0;
        let mut pairs = 0usize;
        for v in observations {
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    total += s.sim(v[i], v[j]);
                    pairs += 1;
                }
            }
        }
        s.mean = if pairs == 0 { 1.0 } else { total / pairs as f64 };
        s
    }
}

/// Similarity scales for the behaviour and price channels, plus the mean
/// price used to centre the price rate statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityContext {
    pub behavior: Similarity,
    pub price: Similarity,
    pub price_mean: f64,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 }
}

fn behavior_as_f64(b: &[u8]) -> Vec<f64> {
    b.iter().map(|&x| x as f64).collect()
}

impl SimilarityContext {
    /// Scales computed from a single state.
    pub fn from_state(state: &WaveState) -> Self {
        SimilarityContext {
            behavior: Similarity::of_values(&behavior_as_f64(&state.behavior)),
            price: Similarity::of_values(&state.price),
            price_mean: mean(&state.price),
        }
    }

    /// Scales pooled over several observed states.
    pub fn from_states(states: &[WaveState]) -> Self {
        let beh: Vec<Vec<f64>> = states.iter().map(|s| behavior_as_f64(&s.behavior)).collect();
        let beh_refs: Vec<&[f64]> = beh.iter().map(Vec::as_slice).collect();
        let price_refs: Vec<&[f64]> = states.iter().map(|s| s.price.as_slice()).collect();
        SimilarityContext {
            behavior: Similarity::pooled(&beh_refs),
            price: Similarity::pooled(&price_refs),
            price_mean: mean(&states.iter().flat_map(|s| s.price.iter().copied()).collect::<Vec<_>>()),
        }
    }
}

/// Network evaluation statistic of actor `i`.
pub fn network_statistic(effect: NetworkEffect, state: &WaveState, ctx: &SimilarityContext, i: usize) -> f64 {
    let g = &state.graph;
    match effect {
        NetworkEffect::Outdegree => g.degree(i) as f64,
        // Σ_{j,k} a_ij a_jk a_ik counts ordered pairs: twice the triangles.
        NetworkEffect::Transitivity => 2.0 * g.triangles_at(i) as f64,
        NetworkEffect::BehaviorHomophily => g
            .neighbors(i)
            .map(|j| ctx.behavior.centered(state.behavior[i] as f64, state.behavior[j] as f64))
            .sum(),
        NetworkEffect::PriceHomophily => g
            .neighbors(i)
            .map(|j| ctx.price.centered(state.price[i], state.price[j]))
            .sum(),
    }
}

/// Network evaluation statistics of actor `i` for each listed effect.
pub fn network_eval_statistics(effects: &[NetworkEffect], state: &WaveState, ctx: &SimilarityContext, i: usize) -> Vec<f64> {
    effects.iter().map(|&e| network_statistic(e, state, ctx, i)).collect()
}

fn peer_influence(g: &Graph, behavior: &[u8], ctx: &SimilarityContext, i: usize, own: u8) -> f64 {
    let d = g.degree(i);
    if d == 0 {
        return 0.0;
    }
    g.neighbors(i)
        .map(|j| ctx.behavior.centered(own as f64, behavior[j] as f64))
        .sum::<f64>()
        / d as f64
}

/// Behaviour evaluation statistic of actor `i`, evaluated as if actor `i`
/// held behaviour `own`.
pub fn behavior_statistic_at(effect: BehaviorEffect, state: &WaveState, ctx: &SimilarityContext, i: usize, own: u8) -> f64 {
    match effect {
        BehaviorEffect::LinearShape => own as f64,
        BehaviorEffect::OutdegreeEffect => own as f64 * state.graph.degree(i) as f64,
        BehaviorEffect::AvgPeerInfluence => peer_influence(&state.graph, &state.behavior, ctx, i, own),
    }
}

pub fn behavior_statistic(effect: BehaviorEffect, state: &WaveState, ctx: &SimilarityContext, i: usize) -> f64 {
    behavior_statistic_at(effect, state, ctx, i, state.behavior[i])
}

pub fn behavior_eval_statistics(effects: &[BehaviorEffect], state: &WaveState, ctx: &SimilarityContext, i: usize) -> Vec<f64> {
    effects.iter().map(|&e| behavior_statistic(e, state, ctx, i)).collect()
}

/// Change in actor `i`'s network statistic if the tie `{i, j}` is toggled.
pub fn network_toggle_delta(effect: NetworkEffect, state: &WaveState, ctx: &SimilarityContext, i: usize, j: usize) -> f64 {
    let sign = if state.graph.has_edge(i, j) { -1.0 } else { 1.0 };
    sign * match effect {
        NetworkEffect::Outdegree => 1.0,
        NetworkEffect::Transitivity => 2.0 * state.graph.common_neighbors(i, j) as f64,
        NetworkEffect::BehaviorHomophily => ctx.behavior.centered(state.behavior[i] as f64, state.behavior[j] as f64),
        NetworkEffect::PriceHomophily => ctx.price.centered(state.price[i], state.price[j]),
    }
}

/// Sum over actors of a network statistic.
pub fn network_total(effect: NetworkEffect, state: &WaveState, ctx: &SimilarityContext) -> f64 {
    let g = &state.graph;
    match effect {
        NetworkEffect::Outdegree => 2.0 * g.edge_count() as f64,
        NetworkEffect::Transitivity => 6.0 * g.triangle_count() as f64,
        NetworkEffect::BehaviorHomophily => {
            2.0 * g
                .edges()
                .map(|(u, v)| ctx.behavior.centered(state.behavior[u] as f64, state.behavior[v] as f64))
                .sum::<f64>()
        }
        NetworkEffect::PriceHomophily => 2.0 * g.edges().map(|(u, v)| ctx.price.centered(state.price[u], state.price[v])).sum::<f64>(),
    }
}

/// Sum over actors of a behaviour statistic.
pub fn behavior_total(effect: BehaviorEffect, state: &WaveState, ctx: &SimilarityContext) -> f64 {
    (0..state.n()).map(|i| behavior_statistic(effect, state, ctx, i)).sum()
}
