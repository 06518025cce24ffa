use serde::{Deserialize, Serialize};

use super::{run_equilibrium_sim, Estimate, SimConfig};
use crate::error::{invalid, Result};
use crate::mean_field::SamplingDistribution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalityReport {
    pub lambda: f64,
    /// Simulated mean wait with two servers when everyone joins the
    /// shorter of both queues.
    pub w_hat: Estimate,
    /// M/M/2 mean sojourn time `1/(1−λ²)`.
    pub mm2_wait: f64,
    /// Wait of a customer taking the shorter of two independent M/M/1
    /// queues, also `1/(1−λ²)`.
    pub mm1_pair_min2_wait: f64,
    /// `w_hat` lies above the M/M/2 value.
    pub exceeds_mm2: bool,
    /// `(w_hat − mm2_wait) / stderr`.
    pub z_score: f64,
}

/// Two servers, every customer samples both. Shortest-queue routing is not
/// work-conserving (a customer can wait behind one server while the other
/// idles after a departure), so the wait exceeds the pooled M/M/2 value.
pub fn two_server_externality(lambda: f64, horizon: f64, warmup: f64, seed: u64) -> Result<ExternalityReport> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    let cfg = SimConfig::new(2, lambda, SamplingDistribution::point(2, 2)?, horizon, seed)?.with_warmup(warmup)?;
    let w_hat = run_equilibrium_sim(&cfg)?.mean_wait_all;
    let analytic = 1.0 / (1.0 - lambda * lambda);
    Ok(ExternalityReport {
        lambda,
        w_hat,
        mm2_wait: analytic,
        mm1_pair_min2_wait: analytic,
        exceeds_mm2: w_hat.mean > analytic,
        z_score: w_hat.z_score(analytic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_reference_values() {
        let r = two_server_externality(0.5, 2000.0, 100.0, 1).unwrap();
        assert_eq!(r.mm2_wait, 4.0 / 3.0);
        assert_eq!(r.mm1_pair_min2_wait, 4.0 / 3.0);
    }

    #[test]
    fn rejects_zero_load() {
        assert!(two_server_externality(0.0, 100.0, 10.0, 1).is_err());
    }
}
