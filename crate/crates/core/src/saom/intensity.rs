//! Exact generator of the co-evolution chain on tiny state spaces.
//!
//! A state is indexed by its tie bits (pairs `i < j` in lexicographic order)
//! followed by one behaviour bit per actor. Prices are held fixed.

use alloc::vec::Vec;

use super::choice::{behavior_choice_probabilities, network_choice_probabilities};
use super::rate::{rate, Variable};
use super::spec::{EffectSpec, ParameterVector};
use super::stats::SimilarityContext;
use crate::dgp::WaveState;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Matrix;

pub const MAX_INTENSITY_ACTORS: usize = 6;

/// Sparse intensity matrix: off-diagonal entries per row and the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionIntensity {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    pub price: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub diagonal: Vec<f64>,
}

impl TransitionIntensity {
    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    pub fn encode(&self, state: &WaveState) -> usize {
        encode(&self.pairs, state)
    }

    pub fn decode(&self, index: usize) -> WaveState {
        decode(self.n, &self.pairs, &self.price, index)
    }

    pub fn row_sum(&self, k: usize) -> f64 {
        self.diagonal[k] + self.rows[k].iter().map(|(_, q)| q).sum::<f64>()
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.state_count());
        for (k, row) in self.rows.iter().enumerate() {
            m[(k, k)] = self.diagonal[k];
            for &(l, q) in row {
                m[(k, l)] += q;
            }
        }
        m
    }
}

fn pair_list(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn encode(pairs: &[(usize, usize)], state: &WaveState) -> usize {
    let mut k = 0usize;
    for (bit, &(i, j)) in pairs.iter().enumerate() {
        if state.graph.has_edge(i, j) {
            k |= 1 << bit;
        }
    }
    for (i, &b) in state.behavior.iter().enumerate() {
        k |= (b as usize) << (pairs.len() + i);
    }
    k
}

fn decode(n: usize, pairs: &[(usize, usize)], price: &[f64], k: usize) -> WaveState {
    let mut g = Graph::new(n);
    for (bit, &(i, j)) in pairs.iter().enumerate() {
        if k >> bit & 1 == 1 {
            g.add_edge(i, j);
        }
    }
    let behavior = (0..n).map(|i| (k >> (pairs.len() + i) & 1) as u8).collect();
    WaveState {
        graph: g,
        behavior,
        price: price.to_vec(),
    }
}

/// Intensity matrix of period `period` over all states sharing the actor
/// count and prices of `state`.
pub fn transition_intensity(
    state: &WaveState,
    params: &ParameterVector,
    spec: &EffectSpec,
    ctx: &SimilarityContext,
    period: usize,
) -> Result<TransitionIntensity> {
    let n = state.n();
    if n > MAX_INTENSITY_ACTORS {
        return Err(Error::StateSpaceTooLarge {
            actors: n,
            max_actors: MAX_INTENSITY_ACTORS,
        });
    }
    params.validate(spec)?;
    let pairs = pair_list(n);
    let count = 1usize << (pairs.len() + n);
    let mut rows = Vec::with_capacity(count);
    let mut diagonal = Vec::with_capacity(count);
    let pair_bit = |i: usize, j: usize| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        pairs.iter().position(|&p| p == (a, b)).unwrap()
    };
    for k in 0..count {
        let s = decode(n, &pairs, &state.price, k);
        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut push = |target: usize, q: f64| {
            if q == 0.0 {
                return;
            }
            match row.iter_mut().find(|(t, _)| *t == target) {
                Some(e) => e.1 += q,
                None => row.push((target, q)),
            }
        };
        for i in 0..n {
            let lambda = rate(i, &s, params, spec, ctx, Variable::Network, period);
            if lambda > 0.0 {
                let p = network_choice_probabilities(&s, ctx, &spec.network_eval_effects, &params.beta_net, i);
                for j in (0..n).filter(|&j| j != i) {
                    push(k ^ 1 << pair_bit(i, j), lambda * p[j]);
                }
            }
            let lambda = rate(i, &s, params, spec, ctx, Variable::Behavior, period);
            if lambda > 0.0 {
                let p = behavior_choice_probabilities(&s, ctx, &spec.behavior_eval_effects, &params.beta_beh, i);
                let other = 1 - s.behavior[i] as usize;
                push(k ^ 1 << (pairs.len() + i), lambda * p[other]);
            }
        }
        row.sort_by_key(|e| e.0);
        diagonal.push(-row.iter().map(|(_, q)| q).sum::<f64>());
        rows.push(row);
    }
    Ok(TransitionIntensity {
        n,
        pairs,
        price: state.price.clone(),
        rows,
        diagonal,
    })
}
