use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use netpolicy::core::dgp::{build_panel, TreatmentAssignment};
use netpolicy::core::effects::{period_proportions, second_order_difference, EffectEstimates, PeriodProportions};
use netpolicy::core::graph::{generate_scale_free, sample_metrics};
use netpolicy::core::sampling::{
    budgeted_independent_set, cluster_sample, independence_bounds, maximal_independent_set, random_sample, BudgetSpec, Strategy,
};
use netpolicy::core::saom::{estimate_mom_with, predict_future, EstimationResult};
use netpolicy::experiment::{fit_with_refits, output_dir};
use netpolicy::{emit_reports, io, run_experiment, Error, Parallel, Result, RunManifest};
use serde::Serialize;

/// Independent-set treatment sampling and network/behaviour co-evolution
/// experiments.
#[derive(Parser)]
#[command(name = "netpolicy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run manifest (JSON). Defaults apply to every absent field.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the manifest.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scale-free graph.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        exponent: Option<f64>,
        #[arg(long)]
        mean_degree: Option<f64>,
    },
    /// Draw a treatment group from a graph.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "independent")]
        strategy: Strategy,
        /// Size for random and cluster samples; defaults to the size of a
        /// maximal independent set drawn with the same seed.
        #[arg(long)]
        size: Option<usize>,
        /// `actor_id,cost` CSV for budgeted samples; unit costs otherwise.
        #[arg(long)]
        costs: Option<PathBuf>,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        epsilon: usize,
    },
    /// Build waves A, B and C for one treatment group.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        treated: PathBuf,
    },
    /// Fit the co-evolution model to a panel directory.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        panel: PathBuf,
    },
    /// Second-order-difference effects for a panel and its treatment group.
    Effects {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        panel: PathBuf,
        #[arg(long)]
        treated: PathBuf,
        /// Fitted model (from `fit`) used to predict period D.
        #[arg(long)]
        fit: Option<PathBuf>,
    },
    /// Run the replicated three-strategy experiment.
    Experiment {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<Strategy>>,
    },
}

fn manifest(common: &Common) -> Result<RunManifest> {
    let mut m: RunManifest = match &common.config {
        Some(path) => io::read_json(path)?,
        None => RunManifest::default(),
    };
    if let Some(seed) = common.seed {
        m.seed = seed;
    }
    if let Some(out) = &common.out {
        m.output_dir = Some(out.clone());
    }
    Ok(m)
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(name);
    io::write_json(&path, value)?;
    Ok(path)
}

#[derive(Serialize)]
struct EffectsOutput {
    proportions: PeriodProportions,
    effects: EffectEstimates,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common, n, exponent, mean_degree } => {
            let m = manifest(&common)?;
            let g = generate_scale_free(
                n.unwrap_or(m.n),
                exponent.unwrap_or(m.graph.exponent),
                mean_degree.unwrap_or(m.graph.mean_degree),
                m.seed,
            )?;
            let out = output_dir(&m);
            let graph_path = out.join("graph.edges");
            io::write_graph(&graph_path, &g)?;
            let metrics = write_json(out, "metrics.json", &io::MetricsRecord::of(&g))?;
            announce(&[graph_path, metrics]);
        }
        Command::Sample { common, graph, strategy, size, costs, budget, max_size, epsilon } => {
            let m = manifest(&common)?;
            let g = io::read_graph(&graph)?;
            let target = || size.unwrap_or_else(|| maximal_independent_set(&g, m.seed).len());
            let set = match strategy {
                Strategy::Independent => maximal_independent_set(&g, m.seed),
                Strategy::Random => random_sample(&g, target(), m.seed)?,
                Strategy::Cluster => cluster_sample(&g, target(), m.seed)?,
                Strategy::BudgetedIndependent => {
                    let max_size = max_size.unwrap_or(g.n());
                    let mut spec = BudgetSpec::unit_costs(g.n(), max_size, epsilon);
                    if let Some(path) = &costs {
                        spec.costs = io::read_costs(path, g.n())?;
                    }
                    spec.budget = budget.unwrap_or(spec.budget);
                    budgeted_independent_set(&g, &spec)?.nodes
                }
            };
            let out = output_dir(&m);
            let set_path = out.join("nodeset.json");
            io::write_node_set(&set_path, &set)?;
            let metrics = write_json(out, "sample_metrics.json", &sample_metrics(&g, &set.members))?;
            let bounds = write_json(out, "bounds.json", &independence_bounds(&g))?;
            eprintln!("{} sample of {} actors", strategy, set.len());
            announce(&[set_path, metrics, bounds]);
        }
        Command::Simulate { common, graph, treated } => {
            let m = manifest(&common)?;
            m.validate()?;
            let g = io::read_graph(&graph)?;
            let actors = RunManifest { n: g.n(), ..m.clone() }.load_actors()?;
            let assignment = TreatmentAssignment {
                treated: io::read_node_set(&treated)?,
                price_multiplier: m.price_multiplier,
            };
            let panel = build_panel(&g, &actors, &assignment, &m.coefficients, &m.probabilities, m.seed)?;
            let dir = output_dir(&m).join("panel");
            let manifest = io::write_panel(&dir, &panel, Some(m.seed), Some(m.probabilities), Some(assignment))?;
            announce(&io::panel_files(&dir, &manifest));
        }
        Command::Fit { common, panel } => {
            let m = manifest(&common)?;
            m.validate()?;
            let (panel, _) = io::read_panel(&panel)?;
            let fit = if m.max_refits == 0 {
                let settings = netpolicy::core::saom::EstimationSettings { seed: m.seed, ..m.estimation.clone() };
                estimate_mom_with(&panel, &m.effects, &settings, &Parallel)?
            } else {
                fit_with_refits(&panel, &m.effects, &m.estimation, m.max_refits, m.seed, &Parallel)?.0
            };
            let out = output_dir(&m);
            let fit_path = write_json(out, "fit.json", &fit)?;
            let table = write_json(out, "parameters.json", &fit.parameter_table())?;
            announce(&[fit_path, table]);
            for row in fit.parameter_table() {
                let se = row.standard_error.map_or("NA".to_string(), |s| format!("{s:.4}"));
                eprintln!("{:<36} {:>10.4} ({se}){}", row.name, row.estimate, if row.fixed { " fixed" } else { "" });
            }
            eprintln!("max convergence ratio {:.4}, converged: {}", fit.max_convergence_ratio, fit.converged);
            if !fit.converged {
                return Err(Error::NonConvergence(format!("max convergence ratio {:.4}", fit.max_convergence_ratio)));
            }
        }
        Command::Effects { common, panel, treated, fit } => {
            let m = manifest(&common)?;
            let (panel, _) = io::read_panel(&panel)?;
            let treated = io::read_node_set(&treated)?;
            let mut states = panel.waves.clone();
            if let Some(path) = fit {
                let fit: EstimationResult = io::read_json(&path)?;
                let future = predict_future(panel.last(), &fit, m.prediction_epochs, false, m.seed)?;
                states.push(future.last().expect("prediction includes the start state").clone());
            }
            let proportions = period_proportions(&states, &treated)?;
            let effects = second_order_difference(&proportions, m.gap_convention)?;
            let path = write_json(output_dir(&m), "effects.json", &EffectsOutput { proportions, effects })?;
            announce(&[path]);
        }
        Command::Experiment { common, reps, strategies } => {
            let mut m = manifest(&common)?;
            if let Some(r) = reps {
                m.replications = r;
            }
            if let Some(s) = strategies {
                m.strategies = s;
            }
            let record = run_experiment(&m)?;
            for (rep, run) in record.excluded() {
                eprintln!("excluded: replication {rep} {}: {}", run.strategy, run.failure.as_deref().unwrap_or(""));
            }
            let written = emit_reports(&record, output_dir(&m))?;
            announce(&written);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
