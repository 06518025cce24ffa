use serde::{Deserialize, Serialize};

use super::{run_equilibrium_sim, Estimate, SimConfig};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationEstimate {
    /// `None` when tagged customers draw from the population distribution.
    pub tagged_l: Option<usize>,
    /// `c·E[W] + c_s·E[L]` of a population customer.
    pub cost_equilibrium: Estimate,
    /// `c·E[W(tagged_l)] + c_s·tagged_l`.
    pub cost_deviation: Estimate,
    /// `cost_equilibrium − cost_deviation`; positive means deviating pays.
    pub gain: Estimate,
    /// Mean wait observed directly on the tagged stream, if it had arrivals.
    pub tagged_wait_observed: Option<Estimate>,
}

/// Cost of a tagged customer sampling `cfg.tagged_l` queues against the
/// population cost, from one simulation run.
///
/// Both costs use the time-averaged wait an arrival sampling `l` queues
/// would face, which by PASTA is what a thin Poisson stream of such
/// arrivals experiences. Costs are formed per batch, so the gain has a
/// paired standard error. The waits seen by the simulated tagged stream
/// are reported as a cross-check.
pub fn estimate_deviation_cost(cfg: &SimConfig, c: f64, c_s: f64) -> Result<DeviationEstimate> {
    if !(c > 0.0 && c.is_finite() && c_s >= 0.0 && c_s.is_finite()) {
        return Err(invalid(format!("need c > 0 and c_s >= 0, got c {c}, c_s {c_s}")));
    }
    let result = run_equilibrium_sim(cfg)?;
    let population = |w: &[f64]| -> f64 { cfg.mu.support().map(|(l, m)| m * (c * w[l - 1] + c_s * l as f64)).sum() };
    let mut eq = Vec::with_capacity(result.batches.len());
    let mut dev = Vec::with_capacity(result.batches.len());
    let mut gain = Vec::with_capacity(result.batches.len());
    for b in &result.batches {
        let w = &b.conditional_wait;
        let e = population(w);
        let d = match cfg.tagged_l {
            Some(l) => c * w[l - 1] + c_s * l as f64,
            None => e,
        };
        eq.push(e);
        dev.push(d);
        gain.push(e - d);
    }
    Ok(DeviationEstimate {
        tagged_l: cfg.tagged_l,
        cost_equilibrium: Estimate::from_batches(&eq),
        cost_deviation: Estimate::from_batches(&dev),
        gain: Estimate::from_batches(&gain),
        tagged_wait_observed: result.mean_wait_tagged,
    })
}
