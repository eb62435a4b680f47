//! The replicated three-strategy experiment.
//!
//! Per replication: one scale-free graph and one wave-A perturbation shared
//! by every strategy, then per strategy a treatment sample, waves B and C,
//! a model fit (refit with fresh seeds until convergence, up to a cap), a
//! predicted period D and the second-order-difference effects.

use std::path::{Path, PathBuf};
use std::time::Instant;

use netpolicy_core::behavior::{ActorTable, LogisticCoefficients};
use netpolicy_core::dgp::{build_panel, Panel, TreatmentAssignment, WaveProbabilities};
use netpolicy_core::effects::{period_proportions, second_order_difference, summarize_runs, EffectEstimates, GapConvention, RunSummary};
use netpolicy_core::graph::generate_scale_free;
use netpolicy_core::rng::derive;
use netpolicy_core::sampling::{cluster_sample, maximal_independent_set, random_sample, NodeSet, Strategy};
use netpolicy_core::saom::{estimate_mom_with, predict_future, BatchRunner, EffectSpec, EstimationResult, EstimationSettings, ParameterRow, Sequential};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphParams {
    /// Power-law exponent of the degree distribution.
    pub exponent: f64,
    pub mean_degree: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams { exponent: 2.5, mean_degree: 6.0 }
    }
}

/// Everything needed to reproduce an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunManifest {
    /// Master seed; replication `r` uses `derive(seed, [r])`.
    pub seed: u64,
    pub n: usize,
    pub graph: GraphParams,
    pub strategies: Vec<Strategy>,
    pub price_multiplier: f64,
    pub probabilities: WaveProbabilities,
    pub coefficients: LogisticCoefficients,
    /// Actor table CSV; the bundled table when absent. The first `n` rows
    /// are used.
    pub actors: Option<PathBuf>,
    pub effects: EffectSpec,
    pub estimation: EstimationSettings,
    pub replications: usize,
    /// Refits with fresh seeds after an unconverged fit.
    pub max_refits: usize,
    /// Epochs simulated beyond the last wave for period D.
    pub prediction_epochs: usize,
    pub gap_convention: GapConvention,
    pub output_dir: Option<PathBuf>,
    /// Write every panel under `<output_dir>/panels`.
    pub save_panels: bool,
}

impl Default for RunManifest {
    fn default() -> Self {
        RunManifest {
            seed: 0,
            n: 300,
            graph: GraphParams::default(),
            strategies: vec![Strategy::Independent, Strategy::Random, Strategy::Cluster],
            price_multiplier: TreatmentAssignment::DEFAULT_MULTIPLIER,
            probabilities: WaveProbabilities::default(),
            coefficients: LogisticCoefficients::default(),
            actors: None,
            effects: EffectSpec::default(),
            estimation: EstimationSettings::default(),
            replications: 50,
            max_refits: 5,
            prediction_epochs: 1,
            gap_convention: GapConvention::default(),
            output_dir: None,
            save_panels: true,
        }
    }
}

impl RunManifest {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.n < 3 {
            return bad(format!("n = {} is too small", self.n));
        }
        if let Some(s) = self.strategies.iter().find(|s| !matches!(s, Strategy::Independent | Strategy::Random | Strategy::Cluster)) {
            return bad(format!("strategy `{s}` is not supported in experiments"));
        }
        if self.strategies.iter().enumerate().any(|(i, s)| self.strategies[..i].contains(s)) {
            return bad("strategies may be listed only once".into());
        }
        if self.prediction_epochs == 0 {
            return bad("prediction_epochs must be at least 1".into());
        }
        if !(self.price_multiplier.is_finite() && self.price_multiplier > 0.0) {
            return bad("price_multiplier must be positive".into());
        }
        self.probabilities.validate()?;
        self.coefficients.validate()?;
        self.effects.validate()?;
        self.estimation.validate()?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("serialisable manifest").as_bytes())
    }

    /// The actor rows used by every replication.
    pub fn load_actors(&self) -> Result<ActorTable> {
        let table = match &self.actors {
            Some(path) => io::read_actor_table(path)?,
            None => io::bundled_actor_table(),
        };
        if table.len() < self.n {
            return Err(Error::Config(format!("n = {} exceeds the {} actors in the table", self.n, table.len())));
        }
        Ok(ActorTable::new(table.actors[..self.n].to_vec())?)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// One strategy within one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRun {
    pub strategy: Strategy,
    pub treated: io::NodeSetRecord,
    /// Fits attempted, refits included.
    pub fits: usize,
    pub converged: bool,
    pub max_convergence_ratio: Option<f64>,
    pub parameters: Vec<ParameterRow>,
    /// Present only for converged fits.
    pub effects: Option<EffectEstimates>,
    pub panel_dir: Option<PathBuf>,
    /// Why the run is excluded from summaries.
    pub failure: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub index: usize,
    pub seed: u64,
    pub graph_edges: usize,
    pub independent_set_size: usize,
    pub runs: Vec<StrategyRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub manifest_hash: String,
    pub manifest: RunManifest,
    pub replications: Vec<ReplicationRecord>,
    /// Summary over converged runs only.
    pub summary: RunSummary,
    pub seconds: f64,
}

impl RunRecord {
    /// Runs excluded from the summary, as `(replication, run)`.
    pub fn excluded(&self) -> impl Iterator<Item = (usize, &StrategyRun)> {
        self.replications
            .iter()
            .flat_map(|r| r.runs.iter().map(move |s| (r.index, s)))
            .filter(|(_, s)| s.effects.is_none())
    }

    /// Every panel file the record refers to.
    pub fn artifacts(&self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for rep in &self.replications {
            for run in &rep.runs {
                if let Some(dir) = &run.panel_dir {
                    let manifest: io::PanelManifest = io::read_json(&dir.join(io::PANEL_MANIFEST))?;
                    out.extend(io::panel_files(dir, &manifest));
                }
            }
        }
        Ok(out)
    }

    /// Reloads every referenced panel and checks it parses.
    pub fn verify_artifacts(&self) -> Result<()> {
        for rep in &self.replications {
            for run in &rep.runs {
                if let Some(dir) = &run.panel_dir {
                    io::read_panel(dir)?;
                }
            }
        }
        Ok(())
    }
}

/// Treated group for `strategy`. Random and cluster samples target the size
/// of the maximal independent set.
pub fn draw_sample(g: &netpolicy_core::Graph, strategy: Strategy, mis: &NodeSet, seed: u64) -> Result<NodeSet> {
    let set = match strategy {
        Strategy::Independent => mis.clone(),
        Strategy::Random => random_sample(g, mis.len(), seed)?,
        Strategy::Cluster => cluster_sample(g, mis.len(), seed)?,
        other => return Err(Error::Config(format!("strategy `{other}` is not supported in experiments"))),
    };
    if set.is_empty() || set.len() >= g.n() {
        return Err(Error::Core(netpolicy_core::Error::InvalidInput(format!(
            "infeasible {strategy} sample of size {} on {} actors",
            set.len(),
            g.n()
        ))));
    }
    Ok(set)
}

/// Fits `panel`, refitting with fresh seeds until convergence or until
/// `max_refits` refits have been spent. Returns the last fit and the number
/// of fits.
pub fn fit_with_refits(
    panel: &Panel,
    spec: &EffectSpec,
    settings: &EstimationSettings,
    max_refits: usize,
    seed: u64,
    runner: &dyn BatchRunner,
) -> Result<(EstimationResult, usize)> {
    let mut fits = 0;
    loop {
        let s = EstimationSettings {
            seed: derive(seed, &[fits as u64]),
            ..settings.clone()
        };
        let fit = estimate_mom_with(panel, spec, &s, runner)?;
        fits += 1;
        if fit.converged || fits > max_refits {
            return Ok((fit, fits));
        }
    }
}

/// Proportions over A, B, C and the predicted D, and the effects.
pub fn effects_with_prediction(
    panel: &Panel,
    treated: &NodeSet,
    fit: &EstimationResult,
    epochs: usize,
    convention: GapConvention,
    seed: u64,
) -> Result<EffectEstimates> {
    let future = predict_future(panel.last(), fit, epochs, false, seed)?;
    let mut states = panel.waves.clone();
    states.push(future.last().expect("prediction includes the start state").clone());
    let p = period_proportions(&states, treated)?;
    Ok(second_order_difference(&p, convention)?)
}

struct Shared<'a> {
    manifest: &'a RunManifest,
    actors: &'a ActorTable,
}

fn run_replication(shared: &Shared<'_>, index: usize) -> Result<ReplicationRecord> {
    let m = shared.manifest;
    let seed = derive(m.seed, &[index as u64]);
    let g = generate_scale_free(m.n, m.graph.exponent, m.graph.mean_degree, derive(seed, &[0]))?;
    let mis = maximal_independent_set(&g, derive(seed, &[1]));
    // The same panel seed for every strategy: wave A is common and waves B
    // and C use common random numbers.
    let panel_seed = derive(seed, &[2]);
    let mut runs = Vec::with_capacity(m.strategies.len());
    for (k, &strategy) in m.strategies.iter().enumerate() {
        let started = Instant::now();
        let treated = draw_sample(&g, strategy, &mis, derive(seed, &[3, k as u64]))?;
        let assignment = TreatmentAssignment {
            treated: treated.clone(),
            price_multiplier: m.price_multiplier,
        };
        let panel = build_panel(&g, shared.actors, &assignment, &m.coefficients, &m.probabilities, panel_seed)?;
        let panel_dir = match (&m.output_dir, m.save_panels) {
            (Some(out), true) => {
                let dir = out.join("panels").join(format!("rep{index:03}")).join(strategy.as_str());
                io::write_panel(&dir, &panel, Some(panel_seed), Some(m.probabilities), Some(assignment))?;
                Some(dir)
            }
            _ => None,
        };
        let mut run = StrategyRun {
            strategy,
            treated: io::NodeSetRecord::from(&treated),
            fits: 0,
            converged: false,
            max_convergence_ratio: None,
            parameters: Vec::new(),
            effects: None,
            panel_dir,
            failure: None,
            seconds: 0.0,
        };
        match fit_with_refits(&panel, &m.effects, &m.estimation, m.max_refits, derive(seed, &[4, k as u64]), &Sequential) {
            Ok((fit, fits)) => {
                run.fits = fits;
                run.converged = fit.converged;
                run.max_convergence_ratio = Some(fit.max_convergence_ratio);
                run.parameters = fit.parameter_table();
                if fit.converged {
                    let e = effects_with_prediction(&panel, &treated, &fit, m.prediction_epochs, m.gap_convention, derive(seed, &[5, k as u64]))?;
                    run.effects = Some(e);
                } else {
                    run.failure = Some(format!(
                        "not converged after {fits} fits (max convergence ratio {:.3})",
                        fit.max_convergence_ratio
                    ));
                }
            }
            Err(e) => {
                run.fits = m.max_refits + 1;
                run.failure = Some(e.to_string());
            }
        }
        run.seconds = started.elapsed().as_secs_f64();
        runs.push(run);
    }
    Ok(ReplicationRecord {
        index,
        seed,
        graph_edges: g.edge_count(),
        independent_set_size: mis.len(),
        runs,
    })
}

/// Runs every replication (in parallel across replications) and summarises
/// the converged runs.
pub fn run_experiment(manifest: &RunManifest) -> Result<RunRecord> {
    manifest.validate()?;
    let started = Instant::now();
    let actors = manifest.load_actors()?;
    let shared = Shared { manifest, actors: &actors };
    let replications: Vec<ReplicationRecord> = (0..manifest.replications)
        .into_par_iter()
        .map(|r| run_replication(&shared, r))
        .collect::<Result<_>>()?;

    let mut per_strategy: Vec<(String, Vec<EffectEstimates>)> = Vec::new();
    for &s in &manifest.strategies {
        let runs: Vec<EffectEstimates> = replications
            .iter()
            .flat_map(|r| r.runs.iter())
            .filter(|run| run.strategy == s)
            .filter_map(|run| run.effects)
            .collect();
        if !runs.is_empty() {
            per_strategy.push((s.as_str().to_string(), runs));
        }
    }
    let attempted = replications.iter().map(|r| r.runs.len()).sum::<usize>();
    if attempted > 0 && per_strategy.is_empty() {
        let lines: Vec<String> = replications
            .iter()
            .flat_map(|r| {
                r.runs.iter().map(move |s| {
                    format!("replication {} {}: {}", r.index, s.strategy, s.failure.as_deref().unwrap_or("excluded"))
                })
            })
            .collect();
        return Err(Error::NonConvergence(lines.join("\n")));
    }
    let summary = summarize_runs(&per_strategy)?;
    Ok(RunRecord {
        manifest_hash: manifest.hash(),
        manifest: manifest.clone(),
        replications,
        summary,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Output directory of a manifest, defaulting to `out`.
pub fn output_dir(manifest: &RunManifest) -> &Path {
    manifest.output_dir.as_deref().unwrap_or(Path::new("out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_defaults_and_validation() {
        let m = RunManifest::default();
        assert_eq!(m.replications, 50);
        assert_eq!(m.max_refits, 5);
        m.validate().unwrap();
        assert!(RunManifest { replications: 0, ..m.clone() }.validate().is_err());
        let p = WaveProbabilities { wave3_tie_noise: 1.5, ..Default::default() };
        assert!(RunManifest { probabilities: p, ..m.clone() }.validate().is_err());
        let s = vec![Strategy::Random, Strategy::Random];
        assert!(RunManifest { strategies: s, ..m.clone() }.validate().is_err());
        assert!(RunManifest { strategies: vec![Strategy::BudgetedIndependent], ..m.clone() }.validate().is_err());
    }

    #[test]
    fn manifest_json_round_trip_and_hash() {
        let m = RunManifest { n: 40, replications: 2, ..Default::default() };
        let json = io::to_json(&m);
        let back: RunManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.hash(), m.hash());
        assert_ne!(RunManifest { seed: 1, ..m.clone() }.hash(), m.hash());
        let partial: RunManifest = serde_json::from_str(r#"{"n": 30, "strategies": ["independent", "cluster"]}"#).unwrap();
        assert_eq!(partial.replications, 50);
        assert_eq!(partial.strategies, vec![Strategy::Independent, Strategy::Cluster]);
        assert!(serde_json::from_str::<RunManifest>(r#"{"replicates": 3}"#).is_err());
    }

    #[test]
    fn samples_share_the_independent_set_size() {
        let g = generate_scale_free(120, 2.5, 6.0, 3).unwrap();
        let mis = maximal_independent_set(&g, 4);
        let r = draw_sample(&g, Strategy::Random, &mis, 5).unwrap();
        assert_eq!(r.len(), mis.len());
        assert!(draw_sample(&g, Strategy::Independent, &mis, 5).unwrap().is_independent(&g));
        let c = draw_sample(&g, Strategy::Cluster, &mis, 5).unwrap();
        assert!(!c.is_empty());
    }
}
