//! Core algorithms for evaluating policy interventions on networked
//! populations.
//!
//! The crate is `no_std` (with `alloc`) and carries no IO. It provides:
//!
//! * [`graph`]: undirected simple graphs, scale-free generation and the
//!   structural metrics used to compare samples and waves.
//! * [`sampling`]: treatment-group selection (maximal independent set,
//!   uniform random, modularity clusters, budgeted integer programs) and
//!   independence-number bounds.
//! * [`behavior`]: the logistic adoption model and actor covariates.
//! * [`dgp`]: the three-wave data-generating process producing a [`dgp::Panel`].
//! * [`saom`]: the stochastic actor-oriented co-evolution model, its chain
//!   simulator and the method-of-moments estimator.
//! * [`effects`]: second-order-difference effect estimates, run summaries
//!   and the Mann-Whitney U test.
//!
//! Every stochastic routine takes an explicit `u64` seed and is
//! deterministic given that seed.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod behavior;
pub mod dgp;
pub mod effects;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod rng;
pub mod sampling;
pub mod saom;

pub use error::{Error, Result};
pub use graph::Graph;
