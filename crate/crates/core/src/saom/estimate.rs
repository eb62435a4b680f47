//! Method-of-moments estimation with Robbins–Monro updates.
//!
//! Phase 1 estimates the derivative of the expected statistics by common
//! random numbers; Phase 2 iterates `φ ← φ − σ_t D₀⁻¹ (S_t − s)` in
//! sub-phases with halving gain; Phase 3 checks convergence and derives
//! standard errors.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::simulate::simulate_period;
use super::spec::{EffectSpec, ParamKind, ParameterVector};
use super::stats::{behavior_total, network_total, SimilarityContext};
use super::rate::{behavior_rate_statistic, network_rate_statistic};
use crate::dgp::{Panel, WaveState};
use crate::error::{Error, Result};
use crate::linalg::{column_means, covariance, Matrix};
use crate::rng;
#[allow(unused_imports)]
use num_traits::Float;

/// Lower bound applied to estimated rates.
pub const MIN_RATE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimationSettings {
    pub phase1_iterations: usize,
    pub phase2_subphases: Vec<usize>,
    pub phase3_iterations: usize,
    /// Simulations used for the Phase-3 derivative estimate.
    pub derivative_iterations: usize,
    pub gain_a: f64,
    pub gain_b: f64,
    pub gain_schedule: GainSchedule,
    /// Weight of the diagonal in the Phase-2 preconditioner; 1 keeps only
    /// the diagonal of the Phase-1 derivative.
    pub diagonal_weight: f64,
    /// Fraction of the Phase-1 Newton step applied before Phase 2.
    pub phase1_step: f64,
    /// Largest absolute change of one parameter in one update.
    pub max_step: f64,
    /// Finite-difference step for evaluation and rate-effect weights; rates
    /// use this fraction of their current value.
    pub difference_step: f64,
    pub max_convergence_ratio: f64,
    pub max_t_ratio: f64,
    pub max_retries: usize,
    /// Value of rates for periods without observed change.
    pub fixed_rate: f64,
    pub seed: u64,
}

impl Default for EstimationSettings {
    fn default() -> Self {
        EstimationSettings {
            phase1_iterations: 50,
            phase2_subphases: vec![100, 200, 400, 800],
            phase3_iterations: 1000,
            derivative_iterations: 100,
            gain_a: 0.2,
            gain_b: 1.0,
            gain_schedule: GainSchedule::Constant,
            diagonal_weight: 1.0,
            phase1_step: 0.5,
            max_step: 1.0,
            difference_step: 0.1,
            max_convergence_ratio: 0.25,
            max_t_ratio: 0.1,
            max_retries: 3,
            fixed_rate: 0.1,
            seed: 0,
        }
    }
}

impl EstimationSettings {
    pub fn validate(&self) -> Result<()> {
        if self.phase3_iterations < 2 || self.phase1_iterations == 0 || self.derivative_iterations == 0 {
            return Err(Error::invalid("phase 1, phase 3 and derivative runs need at least 1, 2 and 1 simulations"));
        }
        if !(0.0..=1.0).contains(&self.diagonal_weight) || !(0.0..=1.0).contains(&self.phase1_step) {
            return Err(Error::invalid("diagonal weight and phase-1 step must lie in [0, 1]"));
        }
        let positive = [self.gain_a, self.gain_b, self.max_step, self.difference_step, self.fixed_rate];
        if positive.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::invalid("gains, steps and the fixed rate must be positive"));
        }
        Ok(())
    }
}

/// Step size within a Phase-2 sub-phase `k` at iteration `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainSchedule {
    /// `a / 2^k` throughout the sub-phase.
    Constant,
    /// `(a / 2^k) / (b + t)`.
    Harmonic,
}

/// Statistics of one simulated panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub statistics: Vec<f64>,
    pub clamps: u64,
}

/// Executes independent simulation jobs; implementations may run them in
/// parallel but must return results in job order.
pub trait BatchRunner {
    fn run(&self, count: usize, job: &(dyn Fn(usize) -> Simulated + Sync)) -> Vec<Simulated>;
}

pub struct Sequential;

impl BatchRunner for Sequential {
    fn run(&self, count: usize, job: &(dyn Fn(usize) -> Simulated + Sync)) -> Vec<Simulated> {
        (0..count).map(job).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub attempt: usize,
    pub phase: u8,
    pub subphase: Option<usize>,
    /// Full flattened parameter vector after the step.
    pub estimates: Vec<f64>,
    /// Mean deviation of simulated from observed statistics (free entries).
    pub mean_deviation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterRow {
    pub name: alloc::string::String,
    pub kind: ParamKind,
    pub estimate: f64,
    pub standard_error: Option<f64>,
    pub t_ratio: Option<f64>,
    pub fixed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub spec: EffectSpec,
    pub context: SimilarityContext,
    pub estimates: ParameterVector,
    pub layout: Vec<ParamKind>,
    pub fixed: Vec<bool>,
    pub targets: Vec<f64>,
    /// `None` for fixed parameters or when the derivative is singular.
    pub standard_errors: Vec<Option<f64>>,
    pub t_ratios: Vec<Option<f64>>,
    pub max_convergence_ratio: f64,
    pub converged: bool,
    pub attempts: usize,
    pub rate_clamps: u64,
    pub phase_log: Vec<PhaseRecord>,
}

impl EstimationResult {
    pub fn parameter_table(&self) -> Vec<ParameterRow> {
        let flat = self.estimates.to_flat();
        self.layout
            .iter()
            .enumerate()
            .map(|(k, kind)| ParameterRow {
                name: kind.name(),
                kind: *kind,
                estimate: flat[k],
                standard_error: self.standard_errors[k],
                t_ratio: self.t_ratios[k],
                fixed: self.fixed[k],
            })
            .collect()
    }
}

/// Start state of period `m`: observed wave `m` with the prices of wave
/// `m + 1`.
pub fn period_start(panel: &Panel, m: usize) -> WaveState {
    let mut s = panel.waves[m].clone();
    s.price.clone_from(&panel.waves[m + 1].price);
    s
}

/// `graph` from one state with behaviour and prices from another.
fn crossed(graph_from: &WaveState, behavior_from: &WaveState) -> WaveState {
    WaveState {
        graph: graph_from.graph.clone(),
        behavior: behavior_from.behavior.clone(),
        price: behavior_from.price.clone(),
    }
}

/// Moment statistics of a panel given the end state of each period.
///
/// Evaluation statistics are cross-lagged: network effects are totalled on
/// the end network with start-of-period behaviour, behaviour effects on the
/// end behaviour with the start network. Without the lag, selection and
/// influence move the same statistics and the two are poorly separated.
pub fn moment_statistics(panel: &Panel, ends: &[WaveState], ctx: &SimilarityContext, layout: &[ParamKind]) -> Vec<f64> {
    let periods = ends.len();
    let starts: Vec<WaveState> = (0..periods).map(|m| period_start(panel, m)).collect();
    let behavior_changes = |m: usize| -> Vec<f64> {
        starts[m].behavior.iter().zip(&ends[m].behavior).map(|(a, b)| (*a != *b) as u8 as f64).collect()
    };
    layout
        .iter()
        .map(|kind| match *kind {
            ParamKind::NetworkRate { period } => starts[period].graph.hamming(&ends[period].graph) as f64,
            ParamKind::BehaviorRate { period } => behavior_changes(period).iter().sum(),
            ParamKind::NetworkRateEffect { effect } => (0..periods)
                .map(|m| {
                    (0..panel.n())
                        .map(|i| network_rate_statistic(effect, &starts[m], ctx, i) * starts[m].graph.row_difference(&ends[m].graph, i) as f64)
                        .sum::<f64>()
                })
                .sum(),
            ParamKind::NetworkEval { effect } => (0..periods)
                .map(|m| network_total(effect, &crossed(&ends[m], &starts[m]), ctx))
                .sum(),
            ParamKind::BehaviorRateEffect { effect } => (0..periods)
                .map(|m| {
                    behavior_changes(m)
                        .iter()
                        .enumerate()
                        .map(|(i, c)| c * behavior_rate_statistic(effect, &starts[m], ctx, i))
                        .sum::<f64>()
                })
                .sum(),
            ParamKind::BehaviorEval { effect } => (0..periods)
                .map(|m| behavior_total(effect, &crossed(&starts[m], &ends[m]), ctx))
                .sum(),
        })
        .collect()
}

/// Observed moment statistics of a panel.
pub fn observed_statistics(panel: &Panel, spec: &EffectSpec, ctx: &SimilarityContext) -> Vec<f64> {
    let periods = panel.periods();
    let layout = ParameterVector::layout(spec, periods);
    moment_statistics(panel, &panel.waves[1..], ctx, &layout)
}

/// Simulates every period from its observed start and returns the moment
/// statistics.
pub fn simulate_statistics(panel: &Panel, params: &ParameterVector, spec: &EffectSpec, ctx: &SimilarityContext, seed: u64) -> Simulated {
    let periods = panel.periods();
    let layout = ParameterVector::layout(spec, periods);
    let mut clamps = 0;
    let ends: Vec<WaveState> = (0..periods)
        .map(|m| {
            let out = simulate_period(&period_start(panel, m), params, spec, ctx, m, rng::derive(seed, &[m as u64]));
            clamps += out.clamps;
            out.state
        })
        .collect();
    Simulated {
        statistics: moment_statistics(panel, &ends, ctx, &layout),
        clamps,
    }
}

struct Problem<'a> {
    panel: &'a Panel,
    spec: &'a EffectSpec,
    ctx: SimilarityContext,
    settings: &'a EstimationSettings,
    layout: Vec<ParamKind>,
    targets: Vec<f64>,
    /// Indices of free parameters in the flat layout.
    free: Vec<usize>,
    runner: &'a dyn BatchRunner,
    clamps: u64,
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(0.01, 0.99);
    (p / (1.0 - p)).ln()
}

impl Problem<'_> {
    fn periods(&self) -> usize {
        self.panel.periods()
    }

    fn params(&self, flat: &[f64]) -> ParameterVector {
        ParameterVector::from_flat(self.spec, self.periods(), flat)
    }

    fn initial(&self) -> Vec<f64> {
        let n = self.panel.n() as f64;
        let first = &self.panel.waves[0];
        let mean_degree = 2.0 * first.graph.edge_count() as f64 / n;
        let density = if n > 1.0 { mean_degree / (n - 1.0) } else { 0.5 };
        let adoption = first.adopters() as f64 / n;
        self.layout
            .iter()
            .enumerate()
            .map(|(k, kind)| match kind {
                ParamKind::NetworkRate { .. } | ParamKind::BehaviorRate { .. } if !self.free.contains(&k) => self.settings.fixed_rate,
                ParamKind::NetworkRate { .. } => (self.targets[k] / n).max(0.05),
                ParamKind::BehaviorRate { .. } => (2.0 * self.targets[k] / n).max(0.05),
                ParamKind::NetworkEval { effect: super::spec::NetworkEffect::Outdegree } => 0.5 * logit(density),
                ParamKind::BehaviorEval { effect: super::spec::BehaviorEffect::LinearShape } => 0.5 * logit(adoption),
                _ => 0.0,
            })
            .collect()
    }

    fn step_size(&self, flat: &[f64], k: usize) -> f64 {
        if self.layout[k].is_rate() {
            (self.settings.difference_step * flat[k]).max(0.01)
        } else {
            self.settings.difference_step
        }
    }

    fn free_deviation(&self, s: &Simulated) -> Vec<f64> {
        self.free.iter().map(|&k| s.statistics[k] - self.targets[k]).collect()
    }

    /// Mean free deviations and the free-by-free derivative matrix, both by
    /// common random numbers over `reps` seeds.
    fn derivative(&mut self, flat: &[f64], reps: usize, seed_path: &[u64]) -> (Vec<Vec<f64>>, Matrix) {
        let p = self.free.len();
        let steps: Vec<f64> = self.free.iter().map(|&k| self.step_size(flat, k)).collect();
        let base_seed = rng::derive(self.settings.seed, seed_path);
        let (panel, spec, ctx, free, periods) = (self.panel, self.spec, &self.ctx, &self.free, self.periods());
        let job = |idx: usize| -> Simulated {
            let (r, col) = (idx / (p + 1), idx % (p + 1));
            let mut theta = flat.to_vec();
            if col > 0 {
                theta[free[col - 1]] += steps[col - 1];
            }
            let params = ParameterVector::from_flat(spec, periods, &theta);
            simulate_statistics(panel, &params, spec, ctx, rng::derive(base_seed, &[r as u64]))
        };
        let sims = self.runner.run(reps * (p + 1), &job);
        self.clamps += sims.iter().map(|s| s.clamps).sum::<u64>();
        let mut deviations = Vec::with_capacity(reps);
        let mut d = Matrix::zeros(p);
        for r in 0..reps {
            let base = &sims[r * (p + 1)];
            deviations.push(self.free_deviation(base));
            for (c, &step) in steps.iter().enumerate() {
                let moved = &sims[r * (p + 1) + c + 1];
                for (a, &k) in self.free.iter().enumerate() {
                    d[(a, c)] += (moved.statistics[k] - base.statistics[k]) / step / reps as f64;
                }
            }
        }
        (deviations, d)
    }

    fn apply_step(&self, flat: &mut [f64], delta: &[f64]) {
        for (a, &k) in self.free.iter().enumerate() {
            let step = delta[a].clamp(-self.settings.max_step, self.settings.max_step);
            flat[k] -= step;
            if self.layout[k].is_rate() {
                flat[k] = flat[k].max(MIN_RATE);
            }
        }
    }
}

/// `D₀⁻¹` for the Robbins–Monro updates: `(1 − w)·D + w·diag(D)` with the
/// diagonal floored at a tenth of each statistic's standard deviation.
/// Falls back to the pure diagonal when the blend is singular.
fn preconditioner(d: &Matrix, deviations: &[Vec<f64>], diagonal_weight: f64) -> Matrix {
    let cov = covariance(deviations);
    let diag: Vec<f64> = (0..d.dim)
        .map(|a| {
            let floor = (0.1 * cov[(a, a)].max(0.0).sqrt()).max(1e-6);
            d[(a, a)].max(floor)
        })
        .collect();
    let mut inv_diag = Matrix::zeros(d.dim);
    for (a, x) in diag.iter().enumerate() {
        inv_diag[(a, a)] = 1.0 / x;
    }
    if diagonal_weight >= 1.0 {
        return inv_diag;
    }
    let mut blend = Matrix::zeros(d.dim);
    for a in 0..d.dim {
        for b in 0..d.dim {
            blend[(a, b)] = if a == b { diag[a] } else { (1.0 - diagonal_weight) * d[(a, b)] };
        }
    }
    blend.inverse().unwrap_or(inv_diag)
}

fn mahalanobis(mean: &[f64], cov: &Matrix) -> f64 {
    let inv = cov.inverse().or_else(|| {
        let mut ridged = cov.clone();
        let ridge = 1e-8 * (cov.diag().iter().sum::<f64>() / cov.dim.max(1) as f64).max(1e-12);
        for a in 0..cov.dim {
            ridged[(a, a)] += ridge;
        }
        ridged.inverse()
    });
    match inv {
        Some(inv) => {
            let v = inv.mul_vec(mean);
            mean.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
        }
        None => f64::INFINITY,
    }
}

/// Fits the model to `panel`, running simulation batches through `runner`.
pub fn estimate_mom_with(panel: &Panel, spec: &EffectSpec, settings: &EstimationSettings, runner: &dyn BatchRunner) -> Result<EstimationResult> {
    spec.validate()?;
    settings.validate()?;
    if panel.waves.len() < 2 {
        return Err(Error::invalid("estimation needs at least two waves"));
    }
    let ctx = SimilarityContext::from_states(&panel.waves);
    let periods = panel.periods();
    let layout = ParameterVector::layout(spec, periods);
    let targets = observed_statistics(panel, spec, &ctx);
    let fixed: Vec<bool> = layout
        .iter()
        .zip(&targets)
        .map(|(kind, &t)| kind.is_rate() && t == 0.0)
        .collect();
    let free: Vec<usize> = (0..layout.len()).filter(|&k| !fixed[k]).collect();
    let mut problem = Problem {
        panel,
        spec,
        ctx,
        settings,
        layout,
        targets,
        free,
        runner,
        clamps: 0,
    };
    let p = problem.free.len();
    let mut flat = problem.initial();
    let mut log = Vec::new();
    let mut attempt = 0;
    let (ratio, t_ratios, ses, converged) = loop {
        // Phase 1.
        let (dev, d) = problem.derivative(&flat, settings.phase1_iterations, &[attempt as u64, 1]);
        let mean = column_means(&dev);
        let d0_inv = preconditioner(&d, &dev, settings.diagonal_weight);
        if p > 0 {
            let step: Vec<f64> = d0_inv.mul_vec(&mean).iter().map(|x| settings.phase1_step * x).collect();
            problem.apply_step(&mut flat, &step);
        }
        log.push(PhaseRecord { attempt, phase: 1, subphase: None, estimates: flat.clone(), mean_deviation: mean });

        // Phase 2.
        for (sub, &iterations) in settings.phase2_subphases.iter().enumerate() {
            if p == 0 {
                break;
            }
            let gain = settings.gain_a / 2f64.powi(sub as i32);
            let mut sum = vec![0.0; flat.len()];
            let mut dev_sum = vec![0.0; p];
            for t in 0..iterations {
                let seed = rng::derive(settings.seed, &[attempt as u64, 2, sub as u64, t as u64]);
                let sim = simulate_statistics(panel, &problem.params(&flat), spec, &problem.ctx, seed);
                problem.clamps += sim.clamps;
                let dev = problem.free_deviation(&sim);
                let sigma = match settings.gain_schedule {
                    GainSchedule::Constant => gain,
                    GainSchedule::Harmonic => gain / (settings.gain_b + t as f64),
                };
                let delta: Vec<f64> = d0_inv.mul_vec(&dev).iter().map(|x| sigma * x).collect();
                problem.apply_step(&mut flat, &delta);
                for (acc, x) in sum.iter_mut().zip(&flat) {
                    *acc += x;
                }
                for (acc, x) in dev_sum.iter_mut().zip(&dev) {
                    *acc += x;
                }
            }
            if iterations > 0 {
                for (k, acc) in sum.iter().enumerate() {
                    if problem.free.contains(&k) {
                        flat[k] = acc / iterations as f64;
                    }
                }
            }
            log.push(PhaseRecord {
                attempt,
                phase: 2,
                subphase: Some(sub),
                estimates: flat.clone(),
                mean_deviation: dev_sum.iter().map(|x| x / iterations.max(1) as f64).collect(),
            });
        }

        // Phase 3.
        let base = rng::derive(settings.seed, &[attempt as u64, 3]);
        let params = problem.params(&flat);
        let job = |r: usize| simulate_statistics(panel, &params, spec, &problem.ctx, rng::derive(base, &[r as u64]));
        let sims = runner.run(settings.phase3_iterations, &job);
        problem.clamps += sims.iter().map(|s| s.clamps).sum::<u64>();
        let dev: Vec<Vec<f64>> = sims.iter().map(|s| problem.free_deviation(s)).collect();
        let mean = column_means(&dev);
        let cov = covariance(&dev);
        let t: Vec<f64> = (0..p)
            .map(|a| {
                let sd = cov[(a, a)].max(0.0).sqrt();
                if sd > 0.0 {
                    mean[a] / sd
                } else if mean[a] == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let ratio = if p == 0 { 0.0 } else { mahalanobis(&mean, &cov) };
        let (_, d3) = problem.derivative(&flat, settings.derivative_iterations, &[attempt as u64, 4]);
        let ses: Option<Vec<f64>> = d3.inverse().map(|inv| {
            let v = inv.mul(&cov).mul(&inv.transpose());
            v.diag().iter().map(|x| x.max(0.0).sqrt()).collect()
        });
        log.push(PhaseRecord { attempt, phase: 3, subphase: None, estimates: flat.clone(), mean_deviation: mean });
        let converged = ratio < settings.max_convergence_ratio && t.iter().all(|x| x.abs() < settings.max_t_ratio);
        attempt += 1;
        if converged || attempt > settings.max_retries {
            break (ratio, t, ses, converged);
        }
    };

    let n_params = problem.layout.len();
    let mut standard_errors = vec![None; n_params];
    let mut t_full = vec![None; n_params];
    for (a, &k) in problem.free.iter().enumerate() {
        t_full[k] = Some(t_ratios[a]);
        standard_errors[k] = ses.as_ref().map(|s| s[a]);
    }
    Ok(EstimationResult {
        spec: spec.clone(),
        context: problem.ctx,
        estimates: problem.params(&flat),
        fixed: (0..n_params).map(|k| !problem.free.contains(&k)).collect(),
        layout: problem.layout,
        targets: problem.targets,
        standard_errors,
        t_ratios: t_full,
        max_convergence_ratio: ratio,
        converged,
        attempts: attempt,
        rate_clamps: problem.clamps,
        phase_log: log,
    })
}

pub fn estimate_mom(panel: &Panel, spec: &EffectSpec, settings: &EstimationSettings) -> Result<EstimationResult> {
    estimate_mom_with(panel, spec, settings, &Sequential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_scale_free;
    use crate::saom::spec::{BehaviorEffect, NetworkEffect};

    fn quick() -> EstimationSettings {
        EstimationSettings {
            phase1_iterations: 10,
            phase2_subphases: vec![20, 20],
            phase3_iterations: 50,
            derivative_iterations: 10,
            max_retries: 0,
            ..EstimationSettings::default()
        }
    }

    fn simple_spec() -> EffectSpec {
        EffectSpec::new(vec![NetworkEffect::Outdegree], vec![BehaviorEffect::LinearShape], vec![], vec![]).unwrap()
    }

    #[test]
    fn observed_statistics_of_known_panel() {
        let g0 = crate::graph::Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let g1 = crate::graph::Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let a = WaveState::new(g0, vec![0, 1, 0, 0], vec![1.0; 4]).unwrap();
        let b = WaveState::new(g1, vec![1, 1, 0, 1], vec![1.0; 4]).unwrap();
        let panel = Panel::new(vec![a, b]).unwrap();
        let spec = simple_spec();
        let ctx = SimilarityContext::from_states(&panel.waves);
        // [net rate, beh rate, outdegree, linear shape]
        assert_eq!(observed_statistics(&panel, &spec, &ctx), vec![2.0, 2.0, 4.0, 3.0]);
    }

    #[test]
    fn static_behavior_fixes_its_rate() {
        let g = generate_scale_free(20, 2.5, 3.0, 4).unwrap();
        let mut g2 = g.clone();
        g2.toggle(0, 19);
        g2.toggle(3, 7);
        let b: Vec<u8> = (0..20).map(|i| (i % 4 == 0) as u8).collect();
        let a = WaveState::new(g, b.clone(), vec![1.0; 20]).unwrap();
        let c = WaveState::new(g2, b, vec![1.0; 20]).unwrap();
        let panel = Panel::new(vec![a, c]).unwrap();
        let res = estimate_mom(&panel, &simple_spec(), &quick()).unwrap();
        assert_eq!(res.fixed, vec![false, true, false, false]);
        assert_eq!(res.estimates.rho_beh, vec![0.1]);
        assert_eq!(res.standard_errors[1], None);
        assert_eq!(res.t_ratios[1], None);
        assert_eq!(res.parameter_table()[1].estimate, 0.1);
    }

    #[test]
    fn estimation_is_deterministic() {
        let g = generate_scale_free(20, 2.5, 3.0, 6).unwrap();
        let b: Vec<u8> = (0..20).map(|i| (i % 3 == 0) as u8).collect();
        let a = WaveState::new(g.clone(), b.clone(), vec![1.0; 20]).unwrap();
        let spec = simple_spec();
        let ctx = SimilarityContext::from_state(&a);
        let mut truth = ParameterVector::zeros(&spec, 1);
        truth.rho_net = vec![1.0];
        truth.rho_beh = vec![1.0];
        truth.beta_net = vec![-1.0];
        let end = simulate_period(&a, &truth, &spec, &ctx, 0, 3).state;
        let panel = Panel::new(vec![a, end]).unwrap();
        let r1 = estimate_mom(&panel, &spec, &quick()).unwrap();
        let r2 = estimate_mom(&panel, &spec, &quick()).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.estimates.rho_net[0] > 0.0);
        assert_eq!(r1.phase_log.first().map(|r| r.phase), Some(1));
        assert_eq!(r1.phase_log.last().map(|r| r.phase), Some(3));
    }
}
