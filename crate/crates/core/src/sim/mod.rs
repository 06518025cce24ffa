//! Finite-`N` discrete-event simulation of the supermarket model.
//!
//! `N` unit-rate exponential servers receive Poisson arrivals at total rate
//! `Nλ`. Each arrival draws a sample count `L` from the population
//! distribution, inspects `L` distinct queues chosen uniformly and joins the
//! shortest. Queues are exchangeable, so the state is kept as the sorted
//! vector of queue lengths; this is enough for every estimator here and is
//! what the coupling construction needs.
//!
//! All estimators use batch means over `[warmup, horizon]`.

mod config;
mod coupled;
mod deviation;
mod engine;
mod estimate;
mod externality;
mod output;
mod state;

pub use config::{default_warmup, SimConfig, DEFAULT_BATCHES, DEFAULT_TAGGED_FRACTION, MAX_TAGGED_FRACTION};
pub use coupled::{run_coupled_sim, CouplingConfig, CouplingReport};
pub use deviation::{estimate_deviation_cost, DeviationEstimate};
pub use engine::{run_equilibrium_sim, SimResult};
pub use estimate::Estimate;
pub use externality::{two_server_externality, ExternalityReport};
pub use output::{tail_csv, write_tail_csv};
