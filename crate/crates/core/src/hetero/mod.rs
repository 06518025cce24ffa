//! Heterogeneous waiting costs.
//!
//! Each customer's waiting cost `c` is drawn from a continuous density `f`
//! on `[0, c_max]`, while the sampling cost `c_s` is shared. A pure strategy
//! is a nondecreasing step function of `c`, described by its jump points,
//! and induces a sampling distribution on the population. Because the map
//! from thresholds to distributions is a bijection when `f > 0`, the search
//! for an equilibrium runs on distributions.

mod density;
mod nash;
mod strategy;

pub use density::{CostDensity, MASS_TOL};
pub use nash::{hetero_nash, HeteroNashOptions, HeteroNashReport, HeteroStatus};
pub use strategy::{hetero_best_response, mu_from_thresholds, thresholds_from_mu, ThresholdStrategy};
