//! Best responses and equilibria of the homogeneous mean-field game.
//!
//! Everything here reduces to comparisons of the marginal value of sampling
//! `V(L, μ)` against the cost ratio `c_s / c`: an integer `L` is a best
//! response to `μ` iff `V(L, μ) ≤ c_s/c ≤ V(L−1, μ)`, and a non-integer `L`
//! is one iff `V(⌊L⌋, μ) = c_s/c`. Strategies are identified with reals in
//! `[1, l_max]` through the two-point encoding of
//! [`SamplingDistribution::from_real`](crate::mean_field::SamplingDistribution::from_real).

mod best_response;
mod monotonicity;
mod nash;
mod social;
mod two_choice;

pub use best_response::{best_response, is_best_response_to_itself, BestResponseKind, BestResponseSet};
pub use monotonicity::{check_local_monotonicity, LocalMonotonicity, MonotonicityVerdict};
pub use nash::{enumerate_nash, find_nash, Equilibrium, EquilibriumKind, EquilibriumReport};
pub use social::{social_objective, social_optimum, SocialOptimum};
pub use two_choice::{two_choice_best_response, two_choice_marginal_value, TwoChoiceResponse};

use crate::error::Result;
use crate::mean_field::{tail_distribution, MarginalValue, SamplingDistribution, DEFAULT_TOL};

/// Relative tolerance for treating `V(l, μ) = c_s/c` as a tie.
pub const TIE_TOL: f64 = 1e-9;

/// Tolerance of the post-hoc best-response check on equilibria.
pub const VERIFY_TOL: f64 = 1e-9;

/// Interval width at which bisection for mixed equilibria stops.
pub const BISECTION_TOL: f64 = 1e-10;

/// Grid points per unit interval of `q` used by default.
pub const DEFAULT_Q_GRID: usize = 1000;

/// Smallest admissible `q_grid`.
pub const MIN_Q_GRID: usize = 100;

/// `V(l, s)`: marginal value at own sample count `l` when the population
/// plays the real strategy `s`.
pub(crate) fn value_against(l: usize, s: f64, lambda: f64, l_max: usize) -> Result<MarginalValue> {
    let mu = SamplingDistribution::from_real(s, l_max)?;
    Ok(tail_distribution(&mu, lambda, DEFAULT_TOL)?.marginal_value(l, l_max))
}

pub(crate) fn tie_tolerance(ratio: f64) -> f64 {
    TIE_TOL * ratio.abs()
}

pub(crate) fn verify_tolerance(ratio: f64) -> f64 {
    VERIFY_TOL * ratio.abs().max(1.0)
}

/// Bisection for a sign change of `g` on `[lo, hi]`; `g(lo)` and `g(hi)`
/// must have opposite signs.
pub(crate) fn bisect(
    mut lo: f64,
    mut hi: f64,
    mut g_lo: f64,
    tol: f64,
    mut g: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
