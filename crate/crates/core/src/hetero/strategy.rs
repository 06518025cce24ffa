use serde::{Deserialize, Serialize};

use super::CostDensity;
use crate::error::{invalid, Result};
use crate::mean_field::{check_lambda, tail_distribution, SamplingDistribution, DEFAULT_TOL};

/// Pure strategy of the heterogeneous game: a customer whose waiting cost
/// lies in `[c_{l−1}, c_l)` samples `l` queues.
///
/// `thresholds` holds `c_0 = 0 ≤ c_1 ≤ … ≤ c_{l_max} = c_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdStrategy {
    pub thresholds: Vec<f64>,
}

impl ThresholdStrategy {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.len() < 2 {
            return Err(invalid("need at least c_0 and c_max"));
        }
        if thresholds[0] != 0.0 {
            return Err(invalid("c_0 must be 0"));
        }
        for (j, w) in thresholds.windows(2).enumerate() {
            if !(w[1] >= w[0]) {
                return Err(invalid(format!("thresholds decrease at index {}", j + 1)));
            }
        }
        Ok(Self { thresholds })
    }

    pub fn l_max(&self) -> usize {
        self.thresholds.len() - 1
    }

    pub fn c_max(&self) -> f64 {
        self.thresholds[self.l_max()]
    }

    /// Number of queues sampled by a customer with waiting cost `c`.
    pub fn samples_for(&self, c: f64) -> usize {
        let l = self.thresholds[1..].partition_point(|t| *t <= c) + 1;
        l.min(self.l_max())
    }

    /// Largest absolute threshold difference.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.thresholds
            .iter()
            .zip(&other.thresholds)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_support(strategy: &ThresholdStrategy, f: &CostDensity) -> Result<()> {
    let (a, b) = (strategy.c_max(), f.c_max());
    if (a - b).abs() > 1e-12 * b.max(1.0) {
        return Err(invalid(format!("strategy ends at {a} but density support ends at {b}")));
    }
    Ok(())
}

/// `μ(l) = ∫_{c_{l−1}}^{c_l} f`.
pub fn mu_from_thresholds(strategy: &ThresholdStrategy, f: &CostDensity) -> Result<SamplingDistribution> {
    check_support(strategy, f)?;
    let cdf: Vec<f64> = strategy.thresholds.iter().map(|c| f.cdf(*c)).collect();
    let mass = cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    SamplingDistribution::from_unnormalized(mass)
}

/// Inverse of [`mu_from_thresholds`]: `c_l = F⁻¹(μ(1) + … + μ(l))`.
pub fn thresholds_from_mu(mu: &SamplingDistribution, f: &CostDensity) -> Result<ThresholdStrategy> {
    f.check_positive()?;
    let l_max = mu.l_max();
    let mut thresholds = Vec::with_capacity(l_max + 1);
    thresholds.push(0.0);
    let mut cum = 0.0;
    for l in 1..l_max {
        cum += mu.mass(l);
        let c = f.quantile(cum.min(1.0))?;
        thresholds.push(c.max(*thresholds.last().expect("nonempty")));
    }
    thresholds.push(f.c_max());
    ThresholdStrategy::new(thresholds)
}

/// Best reply to a population playing `mu_other`: a customer with cost `c`
/// samples more than `j` queues iff `c·V(j, μ) > c_s`, so
/// `c_j = clamp(c_s / V(j, μ), 0, c_max)`.
pub fn hetero_best_response(
    mu_other: &SamplingDistribution,
    lambda: f64,
    c_s: f64,
    f: &CostDensity,
) -> Result<ThresholdStrategy> {
    check_lambda(lambda)?;
    if !(c_s >= 0.0 && c_s.is_finite()) {
        return Err(invalid(format!("c_s must be >= 0, got {c_s}")));
    }
    let l_max = mu_other.l_max();
    let c_max = f.c_max();
    let tail = tail_distribution(mu_other, lambda, DEFAULT_TOL)?;
    let mut thresholds = vec![0.0];
    for j in 1..l_max {
        let v = tail.wait_reduction(j);
        let c = if c_s == 0.0 { 0.0 } else { (c_s / v).clamp(0.0, c_max) };
        thresholds.push(c);
    }
    thresholds.push(c_max);
    ThresholdStrategy::new(thresholds)
}
