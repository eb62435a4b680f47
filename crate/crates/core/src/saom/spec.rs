use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Network evaluation effects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkEffect {
    Outdegree,
    Transitivity,
    BehaviorHomophily,
    PriceHomophily,
}

/// Behaviour evaluation effects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorEffect {
    LinearShape,
    OutdegreeEffect,
    AvgPeerInfluence,
}

/// Effects on the network rate function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkRateEffect {
    /// Multiplies the rate by `(degree + 1)^α`.
    LogOutdegree,
    BehaviorOnNetRate,
    PriceOnNetRate,
}

/// Effects on the behaviour rate function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorRateEffect {
    PriceOnBehRate,
}

impl NetworkEffect {
    pub fn name(self) -> &'static str {
        match self {
            NetworkEffect::Outdegree => "outdegree",
            NetworkEffect::Transitivity => "transitivity",
            NetworkEffect::BehaviorHomophily => "behavior homophily",
            NetworkEffect::PriceHomophily => "price homophily",
        }
    }
}

impl BehaviorEffect {
    pub fn name(self) -> &'static str {
        match self {
            BehaviorEffect::LinearShape => "linear shape",
            BehaviorEffect::OutdegreeEffect => "behavior outdegree",
            BehaviorEffect::AvgPeerInfluence => "average peer influence",
        }
    }
}

impl NetworkRateEffect {
    pub fn name(self) -> &'static str {
        match self {
            NetworkRateEffect::LogOutdegree => "log outdegree (network rate)",
            NetworkRateEffect::BehaviorOnNetRate => "behavior on network rate",
            NetworkRateEffect::PriceOnNetRate => "price on network rate",
        }
    }
}

impl BehaviorRateEffect {
    pub fn name(self) -> &'static str {
        match self {
            BehaviorRateEffect::PriceOnBehRate => "price on behavior rate",
        }
    }
}

/// The declared model. The outdegree effect is always part of the network
/// evaluation function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EffectSpec {
    pub network_eval_effects: Vec<NetworkEffect>,
    pub behavior_eval_effects: Vec<BehaviorEffect>,
    pub network_rate_effects: Vec<NetworkRateEffect>,
    pub behavior_rate_effects: Vec<BehaviorRateEffect>,
}

impl Default for EffectSpec {
    fn default() -> Self {
        EffectSpec {
            network_eval_effects: vec![
                NetworkEffect::Outdegree,
                NetworkEffect::Transitivity,
                NetworkEffect::BehaviorHomophily,
                NetworkEffect::PriceHomophily,
            ],
            behavior_eval_effects: vec![
                BehaviorEffect::LinearShape,
                BehaviorEffect::OutdegreeEffect,
                BehaviorEffect::AvgPeerInfluence,
            ],
            network_rate_effects: Vec::new(),
            behavior_rate_effects: Vec::new(),
        }
    }
}

fn has_duplicates<T: PartialEq>(v: &[T]) -> bool {
    v.iter().enumerate().any(|(i, a)| v[..i].contains(a))
}

impl EffectSpec {
    /// Builds a spec, inserting the outdegree effect at the front when absent.
    pub fn new(
        mut network_eval_effects: Vec<NetworkEffect>,
        behavior_eval_effects: Vec<BehaviorEffect>,
        network_rate_effects: Vec<NetworkRateEffect>,
        behavior_rate_effects: Vec<BehaviorRateEffect>,
    ) -> Result<Self> {
        if !network_eval_effects.contains(&NetworkEffect::Outdegree) {
            network_eval_effects.insert(0, NetworkEffect::Outdegree);
        }
        let spec = EffectSpec {
            network_eval_effects,
            behavior_eval_effects,
            network_rate_effects,
            behavior_rate_effects,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.network_eval_effects.contains(&NetworkEffect::Outdegree) {
            return Err(Error::invalid("the outdegree effect must be part of the network evaluation function"));
        }
        if has_duplicates(&self.network_eval_effects)
            || has_duplicates(&self.behavior_eval_effects)
            || has_duplicates(&self.network_rate_effects)
            || has_duplicates(&self.behavior_rate_effects)
        {
            return Err(Error::invalid("effects may be listed only once"));
        }
        Ok(())
    }
}

/// Role of one entry of the flattened parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ParamKind {
    NetworkRate { period: usize },
    BehaviorRate { period: usize },
    NetworkRateEffect { effect: NetworkRateEffect },
    NetworkEval { effect: NetworkEffect },
    BehaviorRateEffect { effect: BehaviorRateEffect },
    BehaviorEval { effect: BehaviorEffect },
}

impl ParamKind {
    pub fn name(&self) -> String {
        match self {
            ParamKind::NetworkRate { period } => alloc::format!("network rate (period {})", period + 1),
            ParamKind::BehaviorRate { period } => alloc::format!("behavior rate (period {})", period + 1),
            ParamKind::NetworkRateEffect { effect } => effect.name().into(),
            ParamKind::NetworkEval { effect } => effect.name().into(),
            ParamKind::BehaviorRateEffect { effect } => effect.name().into(),
            ParamKind::BehaviorEval { effect } => effect.name().into(),
        }
    }

    pub fn is_rate(&self) -> bool {
        matches!(self, ParamKind::NetworkRate { .. } | ParamKind::BehaviorRate { .. })
    }
}

/// All model parameters. `rho_*` are indexed by period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    pub rho_net: Vec<f64>,
    pub rho_beh: Vec<f64>,
    pub alpha_net: Vec<f64>,
    pub alpha_beh: Vec<f64>,
    pub beta_net: Vec<f64>,
    pub beta_beh: Vec<f64>,
}

impl ParameterVector {
    /// All-zero weights and unit rates.
    pub fn zeros(spec: &EffectSpec, periods: usize) -> Self {
        ParameterVector {
            rho_net: vec![1.0; periods],
            rho_beh: vec![1.0; periods],
            alpha_net: vec![0.0; spec.network_rate_effects.len()],
            alpha_beh: vec![0.0; spec.behavior_rate_effects.len()],
            beta_net: vec![0.0; spec.network_eval_effects.len()],
            beta_beh: vec![0.0; spec.behavior_eval_effects.len()],
        }
    }

    pub fn periods(&self) -> usize {
        self.rho_net.len()
    }

    pub fn validate(&self, spec: &EffectSpec) -> Result<()> {
        let dims_ok = self.rho_beh.len() == self.rho_net.len()
            && self.alpha_net.len() == spec.network_rate_effects.len()
            && self.alpha_beh.len() == spec.behavior_rate_effects.len()
            && self.beta_net.len() == spec.network_eval_effects.len()
            && self.beta_beh.len() == spec.behavior_eval_effects.len();
        if !dims_ok {
            return Err(Error::invalid("parameter vector does not match the effect spec"));
        }
        if self.rho_net.iter().chain(&self.rho_beh).any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::invalid("rate parameters must be finite and non-negative"));
        }
        let weights = self.alpha_net.iter().chain(&self.alpha_beh).chain(&self.beta_net).chain(&self.beta_beh);
        if weights.clone().any(|w| !w.is_finite()) {
            return Err(Error::invalid("effect weights must be finite"));
        }
        Ok(())
    }

    /// Parameter roles in flattened order: per period network then
    /// behaviour rate, then network rate effects, network evaluation,
    /// behaviour rate effects, behaviour evaluation.
    pub fn layout(spec: &EffectSpec, periods: usize) -> Vec<ParamKind> {
        let mut kinds = Vec::new();
        for period in 0..periods {
            kinds.push(ParamKind::NetworkRate { period });
            kinds.push(ParamKind::BehaviorRate { period });
        }
        kinds.extend(spec.network_rate_effects.iter().map(|&effect| ParamKind::NetworkRateEffect { effect }));
        kinds.extend(spec.network_eval_effects.iter().map(|&effect| ParamKind::NetworkEval { effect }));
        kinds.extend(spec.behavior_rate_effects.iter().map(|&effect| ParamKind::BehaviorRateEffect { effect }));
        kinds.extend(spec.behavior_eval_effects.iter().map(|&effect| ParamKind::BehaviorEval { effect }));
        kinds
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for m in 0..self.periods() {
            v.push(self.rho_net[m]);
            v.push(self.rho_beh[m]);
        }
        v.extend(&self.alpha_net);
        v.extend(&self.beta_net);
        v.extend(&self.alpha_beh);
        v.extend(&self.beta_beh);
        v
    }

    pub fn from_flat(spec: &EffectSpec, periods: usize, flat: &[f64]) -> Self {
        let mut it = flat.iter().copied();
        let mut p = ParameterVector::zeros(spec, periods);
        for m in 0..periods {
            p.rho_net[m] = it.next().unwrap_or(0.0);
            p.rho_beh[m] = it.next().unwrap_or(0.0);
        }
        for x in p
            .alpha_net
            .iter_mut()
            .chain(p.beta_net.iter_mut())
            .chain(p.alpha_beh.iter_mut())
            .chain(p.beta_beh.iter_mut())
        {
            *x = it.next().unwrap_or(0.0);
        }
        p
    }

    pub fn beta_net_of(&self, spec: &EffectSpec, effect: NetworkEffect) -> Option<f64> {
        spec.network_eval_effects.iter().position(|&e| e == effect).map(|i| self.beta_net[i])
    }

    pub fn beta_beh_of(&self, spec: &EffectSpec, effect: BehaviorEffect) -> Option<f64> {
        spec.behavior_eval_effects.iter().position(|&e| e == effect).map(|i| self.beta_beh[i])
    }
}
