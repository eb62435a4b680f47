//! File formats, a parallel batch runner and the replicated experiment
//! pipeline on top of [`netpolicy_core`].

pub mod error;
pub mod experiment;
pub mod io;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
pub use experiment::{run_experiment, RunManifest, RunRecord};
pub use netpolicy_core as core;
pub use report::emit_reports;
pub use runner::Parallel;
