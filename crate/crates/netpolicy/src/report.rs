//! Report files written after an experiment.
//!
//! | file | content |
//! |---|---|
//! | `effects_summary.csv` | strategy, effect, mean, iqr |
//! | `p_values.json` | pairwise Mann–Whitney tests |
//! | `effects_runs.csv` | one row per converged run, for boxplots |
//! | `parameters.csv`, `parameters.json` | fitted parameter tables |
//! | `excluded.csv` | runs left out of the summary and why |
//! | `record.json` | the full run record |

use std::path::{Path, PathBuf};

use netpolicy_core::effects::{EffectKind, MannWhitney};
use serde::Serialize;

use crate::error::Result;
use crate::experiment::RunRecord;
use crate::io;

pub const SUMMARY_CSV: &str = "effects_summary.csv";
pub const P_VALUES_JSON: &str = "p_values.json";
pub const RUNS_CSV: &str = "effects_runs.csv";
pub const PARAMETERS_CSV: &str = "parameters.csv";
pub const PARAMETERS_JSON: &str = "parameters.json";
pub const EXCLUDED_CSV: &str = "excluded.csv";
pub const RECORD_JSON: &str = "record.json";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn summary_csv(record: &RunRecord) -> String {
    let mut s = String::from("strategy,effect,mean,iqr\n");
    for r in &record.summary.rows {
        s.push_str(&format!("{},{},{:.6},{:.6}\n", r.strategy, r.effect.as_str(), r.mean, r.iqr));
    }
    s
}

#[derive(Serialize)]
struct PValue<'a> {
    effect: EffectKind,
    first: &'a str,
    second: &'a str,
    #[serde(flatten)]
    test: MannWhitney,
}

pub fn p_values_json(record: &RunRecord) -> String {
    let rows: Vec<PValue<'_>> = record
        .summary
        .tests
        .iter()
        .map(|t| PValue {
            effect: t.effect,
            first: &t.first,
            second: &t.second,
            test: t.test,
        })
        .collect();
    io::to_json(&rows)
}

pub fn runs_csv(record: &RunRecord) -> String {
    let mut s = String::from("replication,strategy,direct,short_term,long_term\n");
    for (rep, run) in record.replications.iter().flat_map(|r| r.runs.iter().map(move |run| (r.index, run))) {
        if let Some(e) = run.effects {
            s.push_str(&format!("{rep},{},{},{},{}\n", run.strategy, e.direct, e.short_term, opt(e.long_term)));
        }
    }
    s
}

#[derive(Serialize)]
struct ParameterLine<'a> {
    replication: usize,
    strategy: &'a str,
    converged: bool,
    #[serde(flatten)]
    row: &'a netpolicy_core::saom::ParameterRow,
}

fn parameter_lines(record: &RunRecord) -> Vec<ParameterLine<'_>> {
    record
        .replications
        .iter()
        .flat_map(|r| {
            r.runs.iter().flat_map(move |run| {
                run.parameters.iter().map(move |row| ParameterLine {
                    replication: r.index,
                    strategy: run.strategy.as_str(),
                    converged: run.converged,
                    row,
                })
            })
        })
        .collect()
}

pub fn parameters_csv(record: &RunRecord) -> String {
    let mut s = String::from("replication,strategy,converged,name,estimate,standard_error,t_ratio,fixed\n");
    for p in parameter_lines(record) {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.replication,
            p.strategy,
            p.converged,
            p.row.name,
            p.row.estimate,
            opt(p.row.standard_error),
            opt(p.row.t_ratio),
            p.row.fixed
        ));
    }
    s
}

pub fn excluded_csv(record: &RunRecord) -> String {
    let mut s = String::from("replication,strategy,fits,max_convergence_ratio,reason\n");
    for (rep, run) in record.excluded() {
        let reason = run.failure.as_deref().unwrap_or("").replace(['"', '\n'], " ");
        s.push_str(&format!("{rep},{},{},{},\"{reason}\"\n", run.strategy, run.fits, opt(run.max_convergence_ratio)));
    }
    s
}

/// Writes every report into `dir` and returns the paths written.
pub fn emit_reports(record: &RunRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    let files = [
        (SUMMARY_CSV, summary_csv(record)),
        (P_VALUES_JSON, p_values_json(record)),
        (RUNS_CSV, runs_csv(record)),
        (PARAMETERS_CSV, parameters_csv(record)),
        (PARAMETERS_JSON, io::to_json(&parameter_lines(record))),
        (EXCLUDED_CSV, excluded_csv(record)),
        (RECORD_JSON, io::to_json(record)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = dir.join(name);
        io::write_text(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}
