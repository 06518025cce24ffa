use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::state::SortedQueues;
use super::{Estimate, SimConfig};
use crate::error::Result;

/// Per-batch values kept in the result so that paired statistics can be
/// formed afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub mean_queue_length: f64,
    /// Time-averaged `E[W(l)] = 1 + Σ_k C(n_k, l)/C(N, l)` for
    /// `l = 1..`, i.e. the expected wait of an arrival sampling `l` queues.
    pub conditional_wait: Vec<f64>,
    pub mean_wait_all: Option<f64>,
    pub mean_wait_tagged: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    /// Time-averaged fraction of queues with at least `k` customers.
    pub empirical_tail: Vec<Estimate>,
    /// Same fraction as seen by arriving customers.
    pub arrival_tail: Vec<Estimate>,
    /// Mean wait (queue length found plus one service) of untagged arrivals.
    pub mean_wait_all: Estimate,
    pub mean_wait_tagged: Option<Estimate>,
    /// Index `l − 1`: expected wait when sampling `l` queues.
    pub conditional_wait: Vec<Estimate>,
    pub mean_queue_length: Estimate,
    /// Time-averaged fraction of queues with exactly `k` customers.
    pub queue_length_histogram: Vec<f64>,
    pub event_count: u64,
    /// Arrivals after warmup.
    pub arrivals: u64,
    pub tagged_arrivals: u64,
    pub batches: Vec<BatchSummary>,
}

struct BatchRaw {
    tail: Vec<f64>,
    arrival_tail: Vec<f64>,
    summary: BatchSummary,
    arrivals: u64,
    tagged: u64,
}

/// Integrals over the current batch, updated lazily: a level is brought up
/// to date only when its count is about to change.
struct Accumulators {
    n: f64,
    l_cap: usize,
    start: f64,
    arrivals: u64,
    last_t: Vec<f64>,
    last_a: Vec<u64>,
    time_int: Vec<f64>,
    arrival_int: Vec<f64>,
    /// `[k * l_cap + (l − 1)]`.
    cond_int: Vec<f64>,
    wait_sum: f64,
    wait_count: u64,
    tagged_sum: f64,
    tagged_count: u64,
}

impl Accumulators {
    fn new(n: usize, l_cap: usize) -> Self {
        Self {
            n: n as f64,
            l_cap,
            start: 0.0,
            arrivals: 0,
            last_t: vec![0.0],
            last_a: vec![0],
            time_int: vec![0.0],
            arrival_int: vec![0.0],
            cond_int: vec![0.0; l_cap],
            wait_sum: 0.0,
            wait_count: 0,
            tagged_sum: 0.0,
            tagged_count: 0,
        }
    }

    fn ensure(&mut self, k: usize) {
        while self.time_int.len() <= k {
            self.last_t.push(self.start);
            self.last_a.push(self.arrivals);
            self.time_int.push(0.0);
            self.arrival_int.push(0.0);
            self.cond_int.extend(std::iter::repeat(0.0).take(self.l_cap));
        }
    }

    /// `C(count, l) / C(n, l)`.
    fn choose_ratio(&self, count: u64, l: usize) -> f64 {
        let c = count as f64;
        (0..l)
            .map(|i| (c - i as f64) / (self.n - i as f64))
            .product::<f64>()
            .max(0.0)
    }

    /// Brings level `k` up to time `t` given that its count was `count`.
    fn flush(&mut self, k: usize, t: f64, count: u64) {
        self.ensure(k);
        let dt = t - self.last_t[k];
        let da = (self.arrivals - self.last_a[k]) as f64;
        if count > 0 {
            self.time_int[k] += count as f64 * dt;
            self.arrival_int[k] += count as f64 * da;
            for l in 1..=self.l_cap {
                let r = self.choose_ratio(count, l);
                self.cond_int[k * self.l_cap + l - 1] += r * dt;
            }
        }
        self.last_t[k] = t;
        self.last_a[k] = self.arrivals;
    }

    fn flush_all(&mut self, t: f64, q: &SortedQueues) {
        let top = q.max_level().max(self.time_int.len() - 1);
        for k in 1..=top {
            self.flush(k, t, q.at_least(k));
        }
    }

    fn reset(&mut self, t: f64) {
        self.start = t;
        self.arrivals = 0;
        self.last_t.iter_mut().for_each(|x| *x = t);
        self.last_a.iter_mut().for_each(|x| *x = 0);
        self.time_int.iter_mut().for_each(|x| *x = 0.0);
        self.arrival_int.iter_mut().for_each(|x| *x = 0.0);
        self.cond_int.iter_mut().for_each(|x| *x = 0.0);
        self.wait_sum = 0.0;
        self.wait_count = 0;
        self.tagged_sum = 0.0;
        self.tagged_count = 0;
    }

    fn close(&mut self, t: f64, q: &SortedQueues) -> BatchRaw {
        self.flush_all(t, q);
        let span = t - self.start;
        let norm = self.n * span;
        let levels = self.time_int.len();
        let mut tail = vec![1.0];
        let mut arrival_tail = vec![1.0];
        for k in 1..levels {
            tail.push(self.time_int[k] / norm);
            arrival_tail.push(if self.arrivals > 0 {
                self.arrival_int[k] / (self.n * self.arrivals as f64)
            } else {
                f64::NAN
            });
        }
        let conditional_wait = (1..=self.l_cap)
            .map(|l| 1.0 + (1..levels).map(|k| self.cond_int[k * self.l_cap + l - 1]).sum::<f64>() / span)
            .collect();
        let summary = BatchSummary {
            mean_queue_length: tail[1..].iter().sum(),
            conditional_wait,
            mean_wait_all: (self.wait_count > 0).then(|| self.wait_sum / self.wait_count as f64),
            mean_wait_tagged: (self.tagged_count > 0).then(|| self.tagged_sum / self.tagged_count as f64),
        };
        let raw = BatchRaw {
            tail,
            arrival_tail,
            summary,
            arrivals: self.wait_count,
            tagged: self.tagged_count,
        };
        self.reset(t);
        raw
    }
}

/// Simulates the `N`-queue system and returns batch-means estimates over
/// `[warmup, horizon]`. Deterministic for a given config.
pub fn run_equilibrium_sim(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let l_cap = cfg.max_samples();
    let arrival_rate = n as f64 * cfg.lambda;
    let b = cfg.batches;
    let span = cfg.horizon - cfg.warmup;
    let bounds: Vec<f64> = (0..=b)
        .map(|i| {
            if i == b {
                cfg.horizon
            } else {
                cfg.warmup + span * i as f64 / b as f64
            }
        })
        .collect();

    let mut q = SortedQueues::new(n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = Accumulators::new(n, l_cap);
    let mut raw = Vec::with_capacity(b);
    let mut recording = false;
    let mut next_bound = 0;
    let mut t = 0.0;
    let mut events = 0u64;

    loop {
        let rate = arrival_rate + q.busy() as f64;
        let t_next = if rate > 0.0 {
            t + rng.sample::<f64, _>(Exp1) / rate
        } else {
            f64::INFINITY
        };
        while next_bound <= b && bounds[next_bound] <= t_next {
            let tb = bounds[next_bound];
            if recording {
                raw.push(acc.close(tb, &q));
            } else {
                acc.flush_all(tb, &q);
                acc.reset(tb);
                recording = true;
            }
            next_bound += 1;
        }
        if next_bound > b {
            break;
        }
        t = t_next;
        events += 1;

        if rng.random::<f64>() * rate < arrival_rate {
            let tagged = cfg.tagged_fraction > 0.0 && rng.random::<f64>() < cfg.tagged_fraction;
            let l = match (tagged, cfg.tagged_l) {
                (true, Some(l)) => l,
                _ => cfg.mu.inverse_cdf(rng.random()),
            };
            // Partial Fisher–Yates: the first `l` entries are a uniform sample.
            let mut rank = 0;
            for i in 0..l {
                let j = rng.random_range(i..n);
                perm.swap(i, j);
                rank = rank.max(perm[i]);
            }
            let wait = f64::from(q.length_at(rank)) + 1.0;
            if recording {
                acc.arrivals += 1;
                if tagged {
                    acc.tagged_sum += wait;
                    acc.tagged_count += 1;
                } else {
                    acc.wait_sum += wait;
                    acc.wait_count += 1;
                }
            }
            let level = q.length_at(rank) as usize + 1;
            acc.flush(level, t, q.at_least(level));
            q.join(rank);
        } else {
            let rank = rng.random_range(0..q.busy());
            let level = q.length_at(rank) as usize;
            acc.flush(level, t, q.at_least(level));
            q.leave(rank);
        }
    }
    Ok(summarize(cfg, raw, events))
}

fn summarize(cfg: &SimConfig, raw: Vec<BatchRaw>, events: u64) -> SimResult {
    let levels = raw.iter().map(|r| r.tail.len()).max().unwrap_or(1);
    let column = |get: &dyn Fn(&BatchRaw) -> f64| -> Estimate {
        let values: Vec<f64> = raw.iter().map(get).collect();
        Estimate::from_batches(&values)
    };
    let empirical_tail: Vec<Estimate> = (0..levels)
        .map(|k| {
            if k == 0 {
                Estimate::exact(1.0)
            } else {
                column(&|r| r.tail.get(k).copied().unwrap_or(0.0))
            }
        })
        .collect();
    let arrival_tail = (0..levels)
        .map(|k| {
            if k == 0 {
                return Estimate::exact(1.0);
            }
            let values: Vec<f64> = raw
                .iter()
                .filter(|r| r.arrivals + r.tagged > 0)
                .map(|r| r.arrival_tail.get(k).copied().unwrap_or(0.0))
                .collect();
            Estimate::from_batches(&values)
        })
        .collect();
    let l_cap = cfg.max_samples();
    let conditional_wait: Vec<Estimate> = (0..l_cap).map(|i| column(&|r| r.summary.conditional_wait[i])).collect();

    let observed: Vec<f64> = raw.iter().filter_map(|r| r.summary.mean_wait_all).collect();
    let mean_wait_all = if observed.len() >= 2 {
        Estimate::from_batches(&observed)
    } else {
        // Too few arrivals to observe waits: fall back on the time average
        // that an arrival would see.
        column(&|r| {
            cfg.mu
                .support()
                .map(|(l, m)| m * r.summary.conditional_wait[l - 1])
                .sum()
        })
    };
    let tagged: Vec<f64> = raw.iter().filter_map(|r| r.summary.mean_wait_tagged).collect();
    let mean_wait_tagged = (tagged.len() >= 2).then(|| Estimate::from_batches(&tagged));

    let histogram = (0..levels)
        .map(|k| {
            let here = empirical_tail[k].mean;
            let next = empirical_tail.get(k + 1).map_or(0.0, |e| e.mean);
            (here - next).max(0.0)
        })
        .collect();

    SimResult {
        config: cfg.clone(),
        mean_queue_length: column(&|r| r.summary.mean_queue_length),
        empirical_tail,
        arrival_tail,
        mean_wait_all,
        mean_wait_tagged,
        conditional_wait,
        queue_length_histogram: histogram,
        event_count: events,
        arrivals: raw.iter().map(|r| r.arrivals + r.tagged).sum(),
        tagged_arrivals: raw.iter().map(|r| r.tagged).sum(),
        batches: raw.into_iter().map(|r| r.summary).collect(),
    }
}

impl SimResult {
    /// `max_k |r̂(k) − r(k)|` against a reference tail, with the standard
    /// error at the maximizing level.
    pub fn max_tail_gap(&self, reference: &[f64]) -> Estimate {
        let len = self.empirical_tail.len().max(reference.len());
        let mut best = Estimate::exact(0.0);
        for k in 0..len {
            let est = self.empirical_tail.get(k).copied().unwrap_or(Estimate::exact(0.0));
            let target = reference.get(k).copied().unwrap_or(0.0);
            let gap = (est.mean - target).abs();
            if gap > best.mean {
                best = Estimate {
                    mean: gap,
                    stderr: est.stderr,
                };
            }
        }
        best
    }

    /// Mean queue length over the first and second halves of the batches.
    pub fn split_half_queue_length(&self) -> (Estimate, Estimate) {
        let values: Vec<f64> = self.batches.iter().map(|b| b.mean_queue_length).collect();
        let mid = values.len() / 2;
        (
            Estimate::from_batches(&values[..mid]),
            Estimate::from_batches(&values[mid..]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean_field::{tail_distribution, SamplingDistribution, DEFAULT_TOL};

    fn point(l: usize) -> SamplingDistribution {
        SamplingDistribution::point(l, l).unwrap()
    }

    #[test]
    fn empty_system_waits_one_service() {
        let cfg = SimConfig::new(20, 0.0, point(2), 500.0, 3).unwrap();
        let r = run_equilibrium_sim(&cfg).unwrap();
        assert_eq!(r.event_count, 0);
        assert_eq!(r.mean_wait_all.mean, 1.0);
        assert_eq!(r.empirical_tail.len(), 1);
    }

    #[test]
    fn same_seed_same_result() {
        let cfg = SimConfig::new(50, 0.8, point(2), 800.0, 11)
            .unwrap()
            .with_tagged(0.02, Some(1))
            .unwrap();
        let a = run_equilibrium_sim(&cfg).unwrap();
        let b = run_equilibrium_sim(&cfg).unwrap();
        assert_eq!(a, b);
        let c = run_equilibrium_sim(&SimConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.event_count, c.event_count);
    }

    #[test]
    fn mm1_queues_match_closed_form() {
        let cfg = SimConfig::new(1000, 0.5, point(1), 2100.0, 5).unwrap();
        let r = run_equilibrium_sim(&cfg).unwrap();
        for k in 1..6 {
            let e = r.empirical_tail[k];
            assert!(e.within(0.5f64.powi(k as i32), 3.0), "k={k}: {e:?}");
        }
        assert!(r.mean_wait_all.within(2.0, 3.0), "{:?}", r.mean_wait_all);
    }

    #[test]
    fn two_choice_tail_near_mean_field() {
        let cfg = SimConfig::new(1000, 0.9, point(2), 1200.0, 9).unwrap();
        let r = run_equilibrium_sim(&cfg).unwrap();
        let fixed = tail_distribution(&point(2), 0.9, DEFAULT_TOL).unwrap();
        assert!(r.max_tail_gap(&fixed.r).mean < 0.02);
    }

    #[test]
    fn arrival_and_time_averages_agree() {
        let cfg = SimConfig::new(
            200,
            0.85,
            SamplingDistribution::new(vec![0.5, 0.3, 0.2]).unwrap(),
            2200.0,
            21,
        )
        .unwrap();
        let r = run_equilibrium_sim(&cfg).unwrap();
        for k in 1..5 {
            let (a, b) = (r.empirical_tail[k], r.arrival_tail[k]);
            let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            assert!((a.mean - b.mean).abs() <= 3.0 * se, "k={k}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn tail_is_nonincreasing_and_histogram_sums_to_one() {
        let cfg = SimConfig::new(30, 0.9, point(3), 600.0, 2).unwrap();
        let r = run_equilibrium_sim(&cfg).unwrap();
        assert_eq!(r.empirical_tail[0].mean, 1.0);
        for w in r.empirical_tail.windows(2) {
            assert!(w[1].mean <= w[0].mean);
        }
        assert!((r.queue_length_histogram.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(r.batches.len(), 20);
    }

    #[test]
    fn conditional_wait_matches_observed_wait() {
        let cfg = SimConfig::new(100, 0.9, point(2), 2200.0, 8).unwrap();
        let r = run_equilibrium_sim(&cfg).unwrap();
        let (obs, cond) = (r.mean_wait_all, r.conditional_wait[1]);
        let se = (obs.stderr.powi(2) + cond.stderr.powi(2)).sqrt();
        assert!((obs.mean - cond.mean).abs() <= 3.0 * se, "{obs:?} vs {cond:?}");
        assert!(r.conditional_wait[0].mean > r.conditional_wait[1].mean);
    }
}
