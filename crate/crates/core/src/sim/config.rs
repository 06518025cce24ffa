use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mean_field::SamplingDistribution;

/// Batches used for standard errors.
pub const DEFAULT_BATCHES: usize = 20;

/// Largest tagged fraction accepted; a thicker stream would perturb the
/// population it is meant to probe.
pub const MAX_TAGGED_FRACTION: f64 = 0.05;

pub const DEFAULT_TAGGED_FRACTION: f64 = 0.01;

/// Relaxation slows as the load approaches 1.
pub fn default_warmup(lambda: f64) -> f64 {
    (20.0 / (1.0 - lambda)).max(100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Number of queues.
    pub n: usize,
    /// Arrival rate per server.
    pub lambda: f64,
    /// Population sampling distribution.
    pub mu: SamplingDistribution,
    pub horizon: f64,
    pub warmup: f64,
    pub seed: u64,
    /// Probability that an arrival belongs to the tagged stream.
    #[serde(default)]
    pub tagged_fraction: f64,
    /// Sample count of tagged arrivals; `None` draws it from `mu`.
    #[serde(default)]
    pub tagged_l: Option<usize>,
    #[serde(default = "default_batches")]
    pub batches: usize,
}

fn default_batches() -> usize {
    DEFAULT_BATCHES
}

impl SimConfig {
    /// Config with the default warmup, no tagged stream and 20 batches.
    pub fn new(n: usize, lambda: f64, mu: SamplingDistribution, horizon: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            n,
            lambda,
            mu,
            horizon,
            warmup: default_warmup(lambda),
            seed,
            tagged_fraction: 0.0,
            tagged_l: None,
            batches: DEFAULT_BATCHES,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_warmup(mut self, warmup: f64) -> Result<Self> {
        self.warmup = warmup;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tagged(mut self, fraction: f64, tagged_l: Option<usize>) -> Result<Self> {
        self.tagged_fraction = fraction;
        self.tagged_l = tagged_l;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be >= 1"));
        }
        // λ = 0 is allowed: an empty system is a useful sanity check.
        if !(self.lambda >= 0.0 && self.lambda < 1.0) {
            return Err(invalid(format!("lambda must lie in [0, 1), got {}", self.lambda)));
        }
        if !(self.warmup >= 0.0 && self.warmup < self.horizon && self.horizon.is_finite()) {
            return Err(invalid(format!(
                "need 0 <= warmup < horizon, got warmup {} horizon {}",
                self.warmup, self.horizon
            )));
        }
        if !(0.0..=MAX_TAGGED_FRACTION).contains(&self.tagged_fraction) {
            return Err(invalid(format!(
                "tagged_fraction must lie in [0, {MAX_TAGGED_FRACTION}], got {}",
                self.tagged_fraction
            )));
        }
        if self.mu.support().any(|(l, _)| l > self.n) {
            return Err(invalid(format!("mu samples more than n = {} queues", self.n)));
        }
        if let Some(l) = self.tagged_l {
            if l == 0 || l > self.n {
                return Err(invalid(format!("tagged_l must lie in 1..={}, got {l}", self.n)));
            }
        }
        if self.batches < 2 {
            return Err(invalid("need at least 2 batches"));
        }
        Ok(())
    }

    /// Largest sample count any arrival can use.
    pub(crate) fn max_samples(&self) -> usize {
        self.mu.l_max().max(self.tagged_l.unwrap_or(0)).min(self.n)
    }
}
