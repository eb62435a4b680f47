//! The three-wave data-generating process.
//!
//! * Wave A: small symmetric noise on ties and behaviour.
//! * Wave B: the price policy hits the treated group and their behaviour is
//!   re-drawn from the adoption model at the new price.
//! * Wave C: behaviour loss around the treated group by graph distance, and
//!   homophilous tie formation keyed on treatment status and behaviour.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::behavior::{self, ActorTable, LogisticCoefficients};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{self, ChaCha8Rng};
use crate::sampling::NodeSet;

/// Network, behaviour and price of every actor at one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub graph: Graph,
    pub behavior: Vec<u8>,
    pub price: Vec<f64>,
}

impl WaveState {
    pub fn new(graph: Graph, behavior: Vec<u8>, price: Vec<f64>) -> Result<Self> {
        let n = graph.n();
        for len in [behavior.len(), price.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        if behavior.iter().any(|&b| b > 1) {
            return Err(Error::invalid("behaviour values must be 0 or 1"));
        }
        Ok(WaveState { graph, behavior, price })
    }

    pub fn from_table(graph: Graph, actors: &ActorTable) -> Result<Self> {
        WaveState::new(graph, actors.behaviors(), actors.prices())
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn adopters(&self) -> usize {
        self.behavior.iter().filter(|&&b| b == 1).count()
    }
}

/// Every probability of the process. Defaults are the published rates,
/// converted from percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveProbabilities {
    /// Wave A: per-dyad toggle.
    pub wave1_tie_toggle: f64,
    /// Wave A: per-actor behaviour toggle.
    pub wave1_behavior_toggle: f64,
    /// Wave B: chance that a treated actor's behaviour is re-drawn.
    pub policy_response: f64,
    /// Wave C: behaviour loss at distance exactly 1 from the treated set.
    pub wave3_loss_distance1: f64,
    /// Wave C: behaviour loss at distance exactly 2.
    pub wave3_loss_distance2: f64,
    /// Wave C: behaviour toggle for everybody else.
    pub wave3_behavior_noise: f64,
    /// Wave C: formation between unconnected treated actors with equal behaviour.
    pub wave3_form_treated_same: f64,
    /// Wave C: formation between unconnected untreated actors with equal behaviour.
    pub wave3_form_untreated_same: f64,
    /// Wave C: formation between unconnected treated actors with different behaviour.
    pub wave3_form_treated_different: f64,
    /// Wave C: toggle for all remaining dyads.
    pub wave3_tie_noise: f64,
}

impl Default for WaveProbabilities {
    fn default() -> Self {
        WaveProbabilities {
            wave1_tie_toggle: 5e-5,
            wave1_behavior_toggle: 1e-5,
            policy_response: 1.0,
            wave3_loss_distance1: 0.05,
            wave3_loss_distance2: 0.005,
            wave3_behavior_noise: 5e-4,
            wave3_form_treated_same: 5e-4,
            wave3_form_untreated_same: 5e-5,
            wave3_form_treated_different: 1e-5,
            wave3_tie_noise: 1e-6,
        }
    }
}

impl WaveProbabilities {
    pub const ZERO: WaveProbabilities = WaveProbabilities {
        wave1_tie_toggle: 0.0,
        wave1_behavior_toggle: 0.0,
        policy_response: 0.0,
        wave3_loss_distance1: 0.0,
        wave3_loss_distance2: 0.0,
        wave3_behavior_noise: 0.0,
        wave3_form_treated_same: 0.0,
        wave3_form_untreated_same: 0.0,
        wave3_form_treated_different: 0.0,
        wave3_tie_noise: 0.0,
    };

    fn all(&self) -> [(&'static str, f64); 10] {
        [
            ("wave1_tie_toggle", self.wave1_tie_toggle),
            ("wave1_behavior_toggle", self.wave1_behavior_toggle),
            ("policy_response", self.policy_response),
            ("wave3_loss_distance1", self.wave3_loss_distance1),
            ("wave3_loss_distance2", self.wave3_loss_distance2),
            ("wave3_behavior_noise", self.wave3_behavior_noise),
            ("wave3_form_treated_same", self.wave3_form_treated_same),
            ("wave3_form_untreated_same", self.wave3_form_untreated_same),
            ("wave3_form_treated_different", self.wave3_form_treated_different),
            ("wave3_tie_noise", self.wave3_tie_noise),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in self.all() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(alloc::format!("probability {name} = {p} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// The treated group and the price multiplier applied to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreatmentAssignment {
    pub treated: NodeSet,
    pub price_multiplier: f64,
}

impl TreatmentAssignment {
    pub const DEFAULT_MULTIPLIER: f64 = 1.30;

    pub fn new(treated: NodeSet) -> Self {
        TreatmentAssignment {
            treated,
            price_multiplier: Self::DEFAULT_MULTIPLIER,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.price_multiplier.is_finite() && self.price_multiplier > 0.0) {
            return Err(Error::invalid("price multiplier must be positive"));
        }
        if let Some(&v) = self.treated.members.iter().find(|&&v| v >= n) {
            return Err(Error::invalid(alloc::format!("treated actor {v} is outside 0..{n}")));
        }
        Ok(())
    }
}

#[inline]
fn hit(rng: &mut ChaCha8Rng, p: f64) -> bool {
    p > 0.0 && rng.gen::<f64>() < p
}

/// Wave A: toggles each dyad and each behaviour independently.
pub fn perturb_wave1(state: &WaveState, probs: &WaveProbabilities, seed: u64) -> WaveState {
    let mut rng = rng::from_seed(seed);
    let mut next = state.clone();
    let n = state.n();
    if probs.wave1_tie_toggle > 0.0 {
        for u in 0..n {
            for v in u + 1..n {
                if hit(&mut rng, probs.wave1_tie_toggle) {
                    next.graph.toggle(u, v);
                }
            }
        }
    }
    for b in next.behavior.iter_mut() {
        if hit(&mut rng, probs.wave1_behavior_toggle) {
            *b ^= 1;
        }
    }
    next
}

/// Wave B: multiplies treated prices and re-draws treated behaviour from the
/// adoption model at the new price. Untreated actors and the network are
/// untouched.
pub fn apply_policy_wave2(
    state: &WaveState,
    actors: &ActorTable,
    assignment: &TreatmentAssignment,
    coeffs: &LogisticCoefficients,
    probs: &WaveProbabilities,
    seed: u64,
) -> Result<WaveState> {
    if actors.len() != state.n() {
        return Err(Error::DimensionMismatch {
            expected: state.n(),
            found: actors.len(),
        });
    }
    assignment.validate(state.n())?;
    let mut rng = rng::from_seed(seed);
    let mut next = state.clone();
    for &i in &assignment.treated.members {
        next.price[i] = state.price[i] * assignment.price_multiplier;
        if hit(&mut rng, probs.policy_response) {
            let x = behavior::Covariates {
                price: next.price[i],
                ..actors.actors[i].covariates()
            };
            next.behavior[i] = behavior::bernoulli(&mut rng, behavior::adopt_probability(coeffs, &x));
        }
    }
    Ok(next)
}

/// Wave C. Group membership (distance to the treated set on the current
/// network, treatment status and behaviour) is frozen before any change and
/// all changes are applied simultaneously.
pub fn evolve_wave3(
    state: &WaveState,
    assignment: &TreatmentAssignment,
    probs: &WaveProbabilities,
    seed: u64,
) -> Result<WaveState> {
    assignment.validate(state.n())?;
    let n = state.n();
    let mut rng = rng::from_seed(seed);
    let treated = assignment.treated.indicator(n);
    let dist = state.graph.distances_from(&assignment.treated.members);
    let mut next = state.clone();

    for (i, d) in dist.iter().enumerate() {
        let b = state.behavior[i];
        next.behavior[i] = match *d {
            Some(1) => {
                if b == 1 && hit(&mut rng, probs.wave3_loss_distance1) { 0 } else { b }
            }
            Some(2) => {
                if b == 1 && hit(&mut rng, probs.wave3_loss_distance2) { 0 } else { b }
            }
            _ => {
                if hit(&mut rng, probs.wave3_behavior_noise) { b ^ 1 } else { b }
            }
        };
    }

    for u in 0..n {
        for v in u + 1..n {
            let tied = state.graph.has_edge(u, v);
            let same = state.behavior[u] == state.behavior[v];
            let p = match (tied, treated[u], treated[v], same) {
                (false, true, true, true) => probs.wave3_form_treated_same,
                (false, false, false, true) => probs.wave3_form_untreated_same,
                (false, true, true, false) => probs.wave3_form_treated_different,
                _ => probs.wave3_tie_noise,
            };
            if hit(&mut rng, p) {
                next.graph.toggle(u, v);
            }
        }
    }
    Ok(next)
}

/// An ordered sequence of observations on a fixed actor set.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub waves: Vec<WaveState>,
    pub labels: Vec<String>,
}

impl Panel {
    /// Validates that all waves share one actor set and that there are at
    /// least two of them. Labels default to A, B, C, ...
    pub fn new(waves: Vec<WaveState>) -> Result<Self> {
        if waves.len() < 2 {
            return Err(Error::invalid("a panel needs at least two waves"));
        }
        let n = waves[0].n();
        if let Some(w) = waves.iter().find(|w| w.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: w.n() });
        }
        let labels = (0..waves.len()).map(wave_label).collect();
        Ok(Panel { waves, labels })
    }

    pub fn n(&self) -> usize {
        self.waves[0].n()
    }

    pub fn periods(&self) -> usize {
        self.waves.len() - 1
    }

    pub fn last(&self) -> &WaveState {
        &self.waves[self.waves.len() - 1]
    }
}

/// `A`, `B`, ..., `Z`, `AA`, ...
pub fn wave_label(i: usize) -> String {
    let mut s = String::new();
    let mut k = i;
    loop {
        s.insert(0, (b'A' + (k % 26) as u8) as char);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    s
}

/// Runs waves A, B and C from the initial network and actor table.
pub fn build_panel(
    g0: &Graph,
    actors: &ActorTable,
    assignment: &TreatmentAssignment,
    coeffs: &LogisticCoefficients,
    probs: &WaveProbabilities,
    seed: u64,
) -> Result<Panel> {
    probs.validate()?;
    coeffs.validate()?;
    let start = WaveState::from_table(g0.clone(), actors)?;
    let a = perturb_wave1(&start, probs, rng::derive(seed, &[1]));
    let b = apply_policy_wave2(&a, actors, assignment, coeffs, probs, rng::derive(seed, &[2]))?;
    let c = evolve_wave3(&b, assignment, probs, rng::derive(seed, &[3]))?;
    Panel::new(vec![a, b, c])
}
