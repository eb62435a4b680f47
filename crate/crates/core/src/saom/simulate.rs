//! Continuous-time micro-step simulation over one unit of model time.

use alloc::vec::Vec;

use rand::Rng;

use super::choice::{behavior_choice_probabilities, network_choice_probabilities};
use super::rate::{rate_checked, Variable};
use super::spec::{EffectSpec, ParameterVector};
use super::stats::SimilarityContext;
use crate::dgp::WaveState;
use crate::rng;

/// End state of one simulated period plus micro-step counts.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodOutcome {
    pub state: WaveState,
    pub network_steps: u64,
    pub behavior_steps: u64,
    /// Rate evaluations whose exponent was clamped.
    pub clamps: u64,
}

fn categorical<R: Rng + ?Sized>(rng: &mut R, p: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return k;
        }
    }
    // Rounding left u above the final cumulative sum.
    p.iter().rposition(|&x| x > 0.0).unwrap_or(0)
}

struct Rates {
    net: Vec<f64>,
    beh: Vec<f64>,
    clamps: u64,
}

impl Rates {
    fn refresh(&mut self, i: usize, state: &WaveState, params: &ParameterVector, spec: &EffectSpec, ctx: &SimilarityContext, period: usize) {
        let a = rate_checked(i, state, params, spec, ctx, Variable::Network, period);
        let b = rate_checked(i, state, params, spec, ctx, Variable::Behavior, period);
        self.clamps += a.clamped as u64 + b.clamped as u64;
        self.net[i] = a.value;
        self.beh[i] = b.value;
    }

    fn total(&self) -> f64 {
        self.net.iter().sum::<f64>() + self.beh.iter().sum::<f64>()
    }
}

/// Simulates period `period` from `state`. The price vector of `state` is
/// held fixed throughout.
pub fn simulate_period(
    state: &WaveState,
    params: &ParameterVector,
    spec: &EffectSpec,
    ctx: &SimilarityContext,
    period: usize,
    seed: u64,
) -> PeriodOutcome {
    simulate_period_with(state, params, spec, ctx, period, &mut rng::from_seed(seed))
}

pub fn simulate_period_with<R: Rng + ?Sized>(
    state: &WaveState,
    params: &ParameterVector,
    spec: &EffectSpec,
    ctx: &SimilarityContext,
    period: usize,
    rng: &mut R,
) -> PeriodOutcome {
    let n = state.n();
    let mut state = state.clone();
    let mut rates = Rates {
        net: alloc::vec![0.0; n],
        beh: alloc::vec![0.0; n],
        clamps: 0,
    };
    for i in 0..n {
        rates.refresh(i, &state, params, spec, ctx, period);
    }
    let state_dependent = !spec.network_rate_effects.is_empty();
    let (mut network_steps, mut behavior_steps) = (0u64, 0u64);
    let mut total = rates.total();
    let mut t = 0.0;
    while total > 0.0 {
        t += rng::exponential(rng, total);
        if t > 1.0 {
            break;
        }
        let mut u = rng.gen::<f64>() * total;
        let mut pick = None;
        for (var, list) in [(Variable::Network, &rates.net), (Variable::Behavior, &rates.beh)] {
            for (i, r) in list.iter().enumerate() {
                if u < *r {
                    pick = Some((var, i));
                    break;
                }
                u -= r;
            }
            if pick.is_some() {
                break;
            }
        }
        let (var, i) = pick.unwrap_or_else(|| {
            let i = rates.beh.iter().rposition(|&r| r > 0.0);
            match i {
                Some(i) => (Variable::Behavior, i),
                None => (Variable::Network, rates.net.iter().rposition(|&r| r > 0.0).unwrap_or(0)),
            }
        });
        match var {
            Variable::Network => {
                network_steps += 1;
                let p = network_choice_probabilities(&state, ctx, &spec.network_eval_effects, &params.beta_net, i);
                let j = categorical(rng, &p);
                if j != i {
                    state.graph.toggle(i, j);
                    if state_dependent {
                        rates.refresh(i, &state, params, spec, ctx, period);
                        rates.refresh(j, &state, params, spec, ctx, period);
                        total = rates.total();
                    }
                }
            }
            Variable::Behavior => {
                behavior_steps += 1;
                let p = behavior_choice_probabilities(&state, ctx, &spec.behavior_eval_effects, &params.beta_beh, i);
                let b = categorical(rng, &p) as u8;
                if b != state.behavior[i] {
                    state.behavior[i] = b;
                    if state_dependent {
                        rates.refresh(i, &state, params, spec, ctx, period);
                        total = rates.total();
                    }
                }
            }
        }
    }
    PeriodOutcome {
        state,
        network_steps,
        behavior_steps,
        clamps: rates.clamps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_scale_free;
    use alloc::vec;

    fn start(n: usize, seed: u64) -> WaveState {
        let g = generate_scale_free(n, 2.5, 4.0, seed).unwrap();
        let b = (0..n).map(|i| (i % 3 == 0) as u8).collect();
        let p = (0..n).map(|i| 50.0 + (i % 7) as f64).collect();
        WaveState::new(g, b, p).unwrap()
    }

    #[test]
    fn zero_rates_are_identity() {
        let s = start(30, 1);
        let spec = EffectSpec::default();
        let mut p = ParameterVector::zeros(&spec, 1);
        p.rho_net = vec![0.0];
        p.rho_beh = vec![0.0];
        p.beta_net = vec![1.0, 0.5, 0.2, 0.1];
        let ctx = SimilarityContext::from_state(&s);
        let out = simulate_period(&s, &p, &spec, &ctx, 0, 9);
        assert_eq!(out.state, s);
        assert_eq!(out.network_steps + out.behavior_steps, 0);
    }

    #[test]
    fn deterministic_given_seed() {
        let s = start(30, 2);
        let spec = EffectSpec::default();
        let mut p = ParameterVector::zeros(&spec, 1);
        p.rho_net = vec![3.0];
        p.rho_beh = vec![2.0];
        p.beta_net = vec![-1.0, 0.3, 0.5, 0.2];
        let ctx = SimilarityContext::from_state(&s);
        let a = simulate_period(&s, &p, &spec, &ctx, 0, 5);
        let b = simulate_period(&s, &p, &spec, &ctx, 0, 5);
        assert_eq!(a, b);
        assert_ne!(a.state, s);
    }

    #[test]
    fn behavior_steps_scale_with_rate() {
        let s = start(40, 3);
        let spec = EffectSpec::default();
        let ctx = SimilarityContext::from_state(&s);
        let mut means = Vec::new();
        for rho in [0.5, 1.0, 2.0] {
            let mut p = ParameterVector::zeros(&spec, 1);
            p.rho_net = vec![0.0];
            p.rho_beh = vec![rho];
            let reps = 400;
            let total: u64 = (0..reps).map(|r| simulate_period(&s, &p, &spec, &ctx, 0, r).behavior_steps).sum();
            means.push(total as f64 / reps as f64);
        }
        // Expected n·ρ micro-steps.
        for (m, rho) in means.iter().zip([0.5, 1.0, 2.0]) {
            assert!((m / (40.0 * rho) - 1.0).abs() < 0.05, "{m} vs {}", 40.0 * rho);
        }
    }
}
