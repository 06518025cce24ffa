//! Mean-field model of the supermarket game.
//!
//! In the `N → ∞` limit queue lengths are i.i.d. and the stationary fraction
//! of queues holding at least `k` customers obeys the forward recursion
//! `r(0) = 1`, `r(k) = λ·u_μ(r(k−1))`, where `u_μ(x) = E_μ[x^L]` is the
//! probability generating function of the population's sampling
//! distribution `μ`. A customer who samples `L` queues then waits
//! `E[W(L, μ)] = Σ_k r(k)^L` on average (service included).
//!
//! Every infinite sum over `k` is cut at a certified index: since
//! `u_μ(x) ≤ x` on `[0, 1]`, the discarded mass after index `K` is at most
//! `λ·r(K)/(1−λ)`.

mod ode;
mod params;
mod sampling;
mod tail;

pub use ode::{mean_field_drift, transient_ode, transient_ode_strided, Trajectory};
pub(crate) use params::check_lambda;
pub use params::GameParams;
pub use sampling::{pgf_eval, stochastic_compare, SamplingDistribution, StochasticOrder};
pub use tail::{
    expected_wait, marginal_value, mixed_cost, tail_distribution, total_cost, MarginalValue, TailDistribution,
};

/// Default certified truncation tolerance for sums over the tail.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Tolerance on `Σ μ(l) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
