use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::state::SortedQueues;
use crate::error::{invalid, Error, Result};
use crate::mean_field::{stochastic_compare, SamplingDistribution, StochasticOrder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub n: usize,
    pub lambda: f64,
    pub horizon: f64,
    pub warmup: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub events: u64,
    /// Number of `(event, level)` order comparisons made.
    pub order_checks: u64,
    /// Always zero in a returned report; a violation aborts the run.
    pub violations: u64,
    /// Whether the two sorted length vectors agreed after every event.
    pub identical_throughout: bool,
    /// Time-averaged mean queue length over `[warmup, horizon]`, one entry
    /// per system.
    pub mean_queue_length: [f64; 2],
    pub max_level: usize,
}

/// Drives two `N`-queue systems with one event stream so that system 2,
/// whose customers sample stochastically more queues, never holds more
/// work above any level than system 1:
/// `Σ_i [Q_i² − x]₊ ≤ Σ_i [Q_i¹ − x]₊` for every `x`, checked after every
/// event.
///
/// Both systems are kept as sorted length vectors and aligned by rank.
/// An arrival draws one uniform `U`, giving `L₁ = F₁⁻¹(U) ≤ L₂ = F₂⁻¹(U)`,
/// and one uniform set of `L₂` ranks whose first `L₁` members are system 1's
/// sample. Departures come at rate `N`; each picks one uniform rank and
/// removes a customer from that rank in both systems, and is lost where
/// the queue is empty. Ties in length are broken by position in the sorted
/// vector.
pub fn run_coupled_sim(
    cfg: &CouplingConfig,
    mu1: &SamplingDistribution,
    mu2: &SamplingDistribution,
) -> Result<CouplingReport> {
    if cfg.n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    if !(cfg.lambda >= 0.0 && cfg.lambda < 1.0) {
        return Err(invalid(format!("lambda must lie in [0, 1), got {}", cfg.lambda)));
    }
    if !(cfg.warmup >= 0.0 && cfg.warmup < cfg.horizon && cfg.horizon.is_finite()) {
        return Err(invalid("need 0 <= warmup < horizon"));
    }
    match stochastic_compare(mu1, mu2)? {
        StochasticOrder::Le | StochasticOrder::Eq => {}
        other => {
            return Err(invalid(format!(
                "coupling needs mu1 <= mu2 stochastically, got {other:?}"
            )))
        }
    }
    if mu1.support().chain(mu2.support()).any(|(l, _)| l > cfg.n) {
        return Err(invalid(format!("sample counts exceed n = {}", cfg.n)));
    }

    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut systems = [SortedQueues::new(n), SortedQueues::new(n)];
    let mut perm: Vec<usize> = (0..n).collect();
    let total_rate = n as f64 * (cfg.lambda + 1.0);
    let arrival_share = cfg.lambda / (cfg.lambda + 1.0);

    let mut t = 0.0;
    let mut events = 0u64;
    let mut checks = 0u64;
    let mut identical = true;
    let mut area = [0.0f64; 2];
    let mut max_level = 0;

    loop {
        let t_next = t + rng.sample::<f64, _>(Exp1) / total_rate;
        // Integrate total work over the overlap with [warmup, horizon].
        let (lo, hi) = (t.max(cfg.warmup), t_next.min(cfg.horizon));
        if hi > lo {
            for (a, s) in area.iter_mut().zip(&systems) {
                *a += s.total() as f64 * (hi - lo);
            }
        }
        if t_next > cfg.horizon {
            break;
        }
        t = t_next;
        events += 1;

        if rng.random::<f64>() < arrival_share {
            let u: f64 = rng.random();
            let l2 = mu2.inverse_cdf(u);
            let l1 = mu1.inverse_cdf(u).min(l2);
            let (mut r1, mut r2) = (0, 0);
            for i in 0..l2 {
                let j = rng.random_range(i..n);
                perm.swap(i, j);
                if i < l1 {
                    r1 = r1.max(perm[i]);
                }
                r2 = r2.max(perm[i]);
            }
            systems[0].join(r1);
            systems[1].join(r2);
        } else {
            let rank = rng.random_range(0..n);
            systems[0].leave(rank);
            systems[1].leave(rank);
        }

        let top = systems[0].max_level().max(systems[1].max_level());
        max_level = max_level.max(top);
        let (mut upper, mut lower) = (0u64, 0u64);
        for x in (0..top).rev() {
            upper += systems[0].at_least(x + 1);
            lower += systems[1].at_least(x + 1);
            checks += 1;
            if lower > upper {
                return Err(Error::CouplingViolation {
                    event: events,
                    time: t,
                    level: x as u32,
                    upper,
                    lower,
                });
            }
        }
        identical &= systems[0] == systems[1];
    }

    let span = cfg.horizon - cfg.warmup;
    Ok(CouplingReport {
        events,
        order_checks: checks,
        violations: 0,
        identical_throughout: identical,
        mean_queue_length: [area[0] / (span * n as f64), area[1] / (span * n as f64)],
        max_level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(l: usize, l_max: usize) -> SamplingDistribution {
        SamplingDistribution::point(l, l_max).unwrap()
    }

    fn cfg(n: usize, lambda: f64, horizon: f64, seed: u64) -> CouplingConfig {
        CouplingConfig {
            n,
            lambda,
            horizon,
            warmup: 0.0,
            seed,
        }
    }

    #[test]
    fn equal_strategies_stay_identical() {
        let mu = SamplingDistribution::new(vec![0.3, 0.7]).unwrap();
        let r = run_coupled_sim(&cfg(40, 0.9, 300.0, 1), &mu, &mu).unwrap();
        assert!(r.identical_throughout);
        assert_eq!(r.mean_queue_length[0], r.mean_queue_length[1]);
    }

    #[test]
    fn more_sampling_never_holds_more_work() {
        for seed in 0..3 {
            let r = run_coupled_sim(&cfg(100, 0.9, 400.0, seed), &point(1, 2), &point(2, 2)).unwrap();
            assert_eq!(r.violations, 0);
            assert!(!r.identical_throughout);
            assert!(r.mean_queue_length[1] <= r.mean_queue_length[0]);
            assert!(r.order_checks > r.events);
        }
    }

    #[test]
    fn mixed_pair_with_three_levels() {
        let a = SamplingDistribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let b = SamplingDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let r = run_coupled_sim(&cfg(25, 0.95, 500.0, 7), &a, &b).unwrap();
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn rejects_wrong_order() {
        assert!(run_coupled_sim(&cfg(10, 0.5, 10.0, 1), &point(2, 2), &point(1, 2)).is_err());
    }
}
