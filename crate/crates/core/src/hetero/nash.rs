use serde::{Deserialize, Serialize};

use super::{hetero_best_response, mu_from_thresholds, CostDensity, ThresholdStrategy};
use crate::error::{invalid, Error, Result};
use crate::mean_field::{check_lambda, SamplingDistribution};

/// Total-variation distance between iterates at which the search stops.
pub const STOP_TOL: f64 = 1e-9;

/// Allowed threshold drift under one more best-response step.
pub const FIXED_POINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeteroNashOptions {
    /// Weight on the new best response in each update, in `(0, 1]`.
    pub damping: f64,
    pub max_iter: usize,
    /// Starting distribution; uniform over `1..=l_max` when absent.
    pub initial: Option<SamplingDistribution>,
}

impl Default for HeteroNashOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            max_iter: 10_000,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeteroStatus {
    Converged,
    NonConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeteroNashReport {
    pub status: HeteroStatus,
    /// Best response to the final distribution.
    pub strategy: ThresholdStrategy,
    /// Distribution induced by `strategy`.
    pub mu: SamplingDistribution,
    pub iterations: usize,
    /// Total-variation distance between consecutive iterates.
    pub tv_history: Vec<f64>,
    /// Largest threshold change under one more best-response step.
    pub fixed_point_residual: f64,
}

impl HeteroNashReport {
    pub fn converged(&self) -> bool {
        self.status == HeteroStatus::Converged
    }
}

/// Damped iteration `μ ← (1−d)·μ + d·F(BR(μ))` towards a pure-strategy
/// equilibrium of the heterogeneous game.
///
/// Non-convergence after `max_iter` steps is reported in the status, not as
/// an error. A converged result that fails the fixed-point check is an error.
pub fn hetero_nash(
    lambda: f64,
    c_s: f64,
    l_max: usize,
    f: &CostDensity,
    opts: &HeteroNashOptions,
) -> Result<HeteroNashReport> {
    check_lambda(lambda)?;
    f.validate()?;
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(invalid(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    if l_max == 0 {
        return Err(invalid("l_max must be >= 1"));
    }
    let step = |mu: &SamplingDistribution| -> Result<(ThresholdStrategy, SamplingDistribution)> {
        let br = hetero_best_response(mu, lambda, c_s, f)?;
        let next = mu_from_thresholds(&br, f)?;
        Ok((br, next))
    };

    let mut mu = match &opts.initial {
        Some(m) if m.l_max() != l_max => {
            return Err(invalid(format!(
                "initial distribution has l_max {}, expected {l_max}",
                m.l_max()
            )))
        }
        Some(m) => m.clone(),
        None => SamplingDistribution::new(vec![1.0 / l_max as f64; l_max])?,
    };
    let mut tv_history = Vec::new();
    let mut status = HeteroStatus::NonConverged;
    let mut iterations = 0;
    if l_max == 1 {
        status = HeteroStatus::Converged;
    } else {
        while iterations < opts.max_iter {
            iterations += 1;
            let (_, image) = step(&mu)?;
            let next = mu.mix(&image, opts.damping)?;
            let tv = next.total_variation(&mu);
            tv_history.push(tv);
            mu = next;
            if tv < STOP_TOL {
                status = HeteroStatus::Converged;
                break;
            }
        }
    }

    let (strategy, induced) = step(&mu)?;
    let (again, _) = step(&induced)?;
    let fixed_point_residual = strategy.max_distance(&again);
    if status == HeteroStatus::Converged && !(fixed_point_residual <= FIXED_POINT_TOL) {
        return Err(Error::NashVerification {
            candidate: induced.mean(),
            reason: format!("thresholds move by {fixed_point_residual:e} under one more best response"),
        });
    }
    Ok(HeteroNashReport {
        status,
        strategy,
        mu: induced,
        iterations,
        tv_history,
        fixed_point_residual,
    })
}
