//! Solvers and simulators for the supermarket game.
//!
//! `N` FCFS servers with unit exponential service receive Poisson arrivals at
//! total rate `N·λ`. Every arriving customer picks how many queues `L` to
//! sample, pays `c_s` per sampled queue plus `c` per unit of waiting time, and
//! joins the shortest sampled queue. This crate computes the `N → ∞`
//! (mean-field) picture of that game and checks it against finite-`N`
//! simulation:
//!
//! - [`mean_field`]: equilibrium tail `r(k)`, waiting times, costs, marginal
//!   value of sampling `V(L, μ)`, stochastic ordering, the transient ODE.
//! - [`equilibrium`]: best responses, Nash equilibria (single and
//!   exhaustive), local-monotonicity diagnosis, social optimum, the
//!   two-choice special case.
//! - [`hetero`]: heterogeneous waiting costs, threshold strategies and their
//!   pure-strategy fixed point.
//! - [`sim`]: finite-`N` discrete-event simulation, tagged-deviator costs,
//!   pathwise coupling and the two-server externality example.
//! - [`cli`]: the `supermarket` command-line front end.
//!
//! ```
//! use supermarket::mean_field::{tail_distribution, SamplingDistribution};
//!
//! let two = SamplingDistribution::point(2, 2).unwrap();
//! let tail = tail_distribution(&two, 0.9, 1e-12).unwrap();
//! assert!((tail.r[2] - 0.729).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod equilibrium;
mod error;
pub mod hetero;
pub mod mean_field;
pub mod sim;

pub use error::{Error, Result};
