//! Discrete-block Monte Carlo simulator for mobile cell-free massive MIMO.
//!
//! The simulator models a network of single-antenna APs grouped into square
//! CPU clusters, serving mobile single-antenna UEs. Per communication block
//! it rebuilds candidate serving sets from per-AP SNRs, dispatches one of
//! five handover schemes (always-handover, near-optimal, fairness-
//! differentiated, hysteresis, UE-performance-aware), and scores spectral
//! efficiency under channel aging and handover delay costs.
//!
//! Campaigns are deterministic functions of (config, seed): all randomness
//! flows through counter-derived substreams, so parallel and serial runs
//! emit byte-identical outputs.

pub mod bessel;
pub mod campaign;
pub mod channel;
pub mod config;
pub mod error;
pub mod handover;
pub mod mobility;
pub mod perf;
pub mod report;
pub mod rng;
pub mod serving;
pub mod topology;
pub mod units;

pub use campaign::{run_campaign, run_realization, RealizationResult, SchemeRealization};
pub use config::{SeModel, SimConfig};
pub use error::{Error, Result};
pub use handover::Scheme;
pub use report::{emit_outputs, AggregateReport};
