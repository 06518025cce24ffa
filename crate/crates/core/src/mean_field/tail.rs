use serde::{Deserialize, Serialize};

use super::params::check_lambda;
use super::{GameParams, SamplingDistribution, DEFAULT_TOL};
use crate::error::{invalid, Error, Result};

/// Truncated stationary tail `r(0..=K)` of the mean-field model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDistribution {
    /// `r[k]`: fraction of queues with at least `k` customers.
    pub r: Vec<f64>,
    /// Last retained index `K`.
    pub truncation_k: usize,
    /// Certified upper bound on `Σ_{k > K} r(k)`.
    pub truncation_bound: f64,
    pub lambda: f64,
}

/// Computes the mean-field equilibrium tail for population strategy `mu`.
///
/// `r(0) = 1`, `r(k) = λ·u_μ(r(k−1))`, stopping at the first `K` for which
/// `λ·r(K)/(1−λ) < tol`. Because `r(k+1) ≤ λ·r(k)`, that quantity bounds the
/// discarded mass; it never exceeds `λ^(K+1)/(1−λ)`.
pub fn tail_distribution(mu: &SamplingDistribution, lambda: f64, tol: f64) -> Result<TailDistribution> {
    check_lambda(lambda)?;
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be > 0, got {tol}")));
    }
    let scale = lambda / (1.0 - lambda);
    let mut r = vec![1.0];
    let mut last = 1.0;
    while scale * last >= tol {
        // u(1) = 1 exactly; masses only sum to one up to rounding.
        last = if r.len() == 1 { lambda } else { lambda * mu.pgf(last) };
        r.push(last);
    }
    Ok(TailDistribution {
        truncation_k: r.len() - 1,
        truncation_bound: scale * last,
        r,
        lambda,
    })
}

impl TailDistribution {
    /// `E[W(l, μ)] = Σ_k r(k)^l`.
    pub fn expected_wait(&self, l: usize) -> f64 {
        let l = l as i32;
        // Smallest terms first.
        self.r.iter().rev().map(|x| x.powi(l)).sum()
    }

    /// `E[W(l)] − E[W(l+1)] = Σ_k r(k)^l (1 − r(k))` for `l ≥ 1`.
    pub fn wait_reduction(&self, l: usize) -> f64 {
        let l = l as i32;
        self.r.iter().rev().map(|x| x.powi(l) * (1.0 - x)).sum()
    }

    /// `V(l, μ)` with the boundary conventions `V(0) = ∞`, `V(l_max) = 0`.
    pub fn marginal_value(&self, l: usize, l_max: usize) -> MarginalValue {
        if l == 0 {
            MarginalValue::Unbounded
        } else if l >= l_max {
            MarginalValue::Finite(0.0)
        } else {
            MarginalValue::Finite(self.wait_reduction(l))
        }
    }

    /// `C(l, μ) = c·E[W(l)] + c_s·l`.
    pub fn cost(&self, l: usize, params: &GameParams) -> f64 {
        params.c * self.expected_wait(l) + params.c_s * l as f64
    }
}

/// Marginal value of sampling one more queue.
///
/// `V(0, ·)` is a distinct unbounded value rather than a large float; it only
/// ever takes part in comparisons.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum MarginalValue {
    Finite(f64),
    Unbounded,
}

impl MarginalValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Unbounded => None,
        }
    }

    /// `self ≥ threshold`.
    pub fn at_least(self, threshold: f64) -> bool {
        match self {
            Self::Finite(v) => v >= threshold,
            Self::Unbounded => true,
        }
    }

    /// `self ≤ threshold`.
    pub fn at_most(self, threshold: f64) -> bool {
        match self {
            Self::Finite(v) => v <= threshold,
            Self::Unbounded => false,
        }
    }
}

fn check_l(l: usize, l_max: usize, allow_zero: bool) -> Result<()> {
    let lo = if allow_zero { 0 } else { 1 };
    if l < lo || l > l_max {
        return Err(invalid(format!("sample count {l} outside {lo}..={l_max}")));
    }
    Ok(())
}

/// `E[W(l, μ)]`, truncation error below `tol`.
pub fn expected_wait(l: usize, mu: &SamplingDistribution, lambda: f64, tol: f64) -> Result<f64> {
    check_l(l, mu.l_max(), false)?;
    Ok(tail_distribution(mu, lambda, tol)?.expected_wait(l))
}

/// `C(l, μ) = c·E[W(l, μ)] + c_s·l`.
pub fn total_cost(l: usize, mu: &SamplingDistribution, params: &GameParams) -> Result<f64> {
    params.validate()?;
    check_l(l, params.l_max, false)?;
    check_same_lmax(mu, params)?;
    Ok(tail_distribution(mu, params.lambda, DEFAULT_TOL)?.cost(l, params))
}

/// `C(μ_i, μ_other) = Σ_l μ_i(l)·C(l, μ_other)`.
pub fn mixed_cost(mu_i: &SamplingDistribution, mu_other: &SamplingDistribution, params: &GameParams) -> Result<f64> {
    params.validate()?;
    check_same_lmax(mu_i, params)?;
    check_same_lmax(mu_other, params)?;
    let tail = tail_distribution(mu_other, params.lambda, DEFAULT_TOL)?;
    Ok(mu_i.support().map(|(l, m)| m * tail.cost(l, params)).sum())
}

/// `V(l, μ)` for `0 ≤ l ≤ l_max`.
pub fn marginal_value(l: usize, mu: &SamplingDistribution, lambda: f64, tol: f64) -> Result<MarginalValue> {
    check_l(l, mu.l_max(), true)?;
    if l == 0 || l == mu.l_max() {
        check_lambda(lambda)?;
        return Ok(if l == 0 {
            MarginalValue::Unbounded
        } else {
            MarginalValue::Finite(0.0)
        });
    }
    Ok(tail_distribution(mu, lambda, tol)?.marginal_value(l, mu.l_max()))
}

fn check_same_lmax(mu: &SamplingDistribution, params: &GameParams) -> Result<()> {
    if mu.l_max() != params.l_max {
        return Err(Error::InvalidParameter(format!(
            "distribution has l_max {} but parameters say {}",
            mu.l_max(),
            params.l_max
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean_field::{stochastic_compare, StochasticOrder};
    use proptest::prelude::*;

    const TOL: f64 = DEFAULT_TOL;

    fn point(l: usize, l_max: usize) -> SamplingDistribution {
        SamplingDistribution::point(l, l_max).unwrap()
    }

    fn arb_mu(l_max: usize) -> impl Strategy<Value = SamplingDistribution> {
        prop::collection::vec(0.0f64..1.0, l_max)
            .prop_filter("some mass", |v| v.iter().sum::<f64>() > 1e-3)
            .prop_map(|v| SamplingDistribution::from_unnormalized(v).unwrap())
    }

    #[test]
    fn mm1_tail_is_geometric() {
        let t = tail_distribution(&point(1, 1), 0.5, TOL).unwrap();
        for (k, r) in t.r.iter().enumerate() {
            assert!((r - 0.5f64.powi(k as i32)).abs() <= 1e-15);
        }
        let k = t.truncation_k as i32;
        assert!(0.5f64.powi(k + 1) / 0.5 < TOL);
        assert!(0.5f64.powi(k) / 0.5 >= TOL);
    }

    #[test]
    fn two_choice_tail_matches_closed_form() {
        // r(k) = λ^(2^k − 1) for δ₂.
        let t = tail_distribution(&point(2, 2), 0.9, TOL).unwrap();
        assert!((t.r[1] - 0.9).abs() < 1e-15);
        assert!((t.r[2] - 0.729).abs() < 1e-15);
        assert!((t.r[3] - 0.4782969).abs() < 1e-15);
        for (k, r) in t.r.iter().enumerate() {
            let closed = 0.9f64.powf(2f64.powi(k as i32) - 1.0);
            assert!((r - closed).abs() <= 1e-14 * closed.max(1e-300), "k={k}");
        }
    }

    #[test]
    fn ten_choice_second_level() {
        let t = tail_distribution(&point(10, 10), 0.99, TOL).unwrap();
        assert!((t.r[2] - 0.99f64.powi(11)).abs() < 1e-12);
        assert!((t.r[2] - 0.895338).abs() < 1e-6);
    }

    #[test]
    fn wait_examples() {
        let d1 = point(1, 2);
        assert!((expected_wait(1, &d1, 0.5, TOL).unwrap() - 2.0).abs() < 1e-11);
        assert!((expected_wait(2, &d1, 0.5, TOL).unwrap() - 4.0 / 3.0).abs() < 1e-11);
        let d2 = point(2, 2);
        let w = expected_wait(2, &d2, 0.9, TOL).unwrap();
        let oracle: f64 = (0..64).map(|k| 0.9f64.powf(2f64.powi(k) - 1.0).powi(2)).sum();
        assert!((w - oracle).abs() < 1e-12);
        assert!(w < 1.0 / (1.0 - 0.81));
        assert!(expected_wait(3, &d2, 0.9, TOL).is_err());
    }

    #[test]
    fn cost_examples() {
        let d1 = point(1, 2);
        let p = GameParams::new(0.5, 1.0, 0.1, 2).unwrap();
        assert!((total_cost(1, &d1, &p).unwrap() - 2.1).abs() < 1e-11);
        let p0 = GameParams::new(0.5, 1.0, 0.0, 2).unwrap();
        assert!((total_cost(2, &d1, &p0).unwrap() - 4.0 / 3.0).abs() < 1e-11);
        let p2 = GameParams::new(0.9, 2.0, 0.3, 2).unwrap();
        let d2 = point(2, 2);
        let composed = 2.0 * expected_wait(2, &d2, 0.9, TOL).unwrap() + 0.6;
        assert!((total_cost(2, &d2, &p2).unwrap() - composed).abs() < 1e-12);
    }

    #[test]
    fn mixed_cost_examples() {
        let d1 = point(1, 2);
        let p = GameParams::new(0.5, 1.0, 0.0, 2).unwrap();
        assert!((mixed_cost(&point(2, 2), &d1, &p).unwrap() - total_cost(2, &d1, &p).unwrap()).abs() < 1e-15);
        let half = SamplingDistribution::new(vec![0.5, 0.5]).unwrap();
        assert!((mixed_cost(&half, &d1, &p).unwrap() - 5.0 / 3.0).abs() < 1e-11);
        let q = GameParams::new(0.5, 1.0, 0.1, 2).unwrap();
        let real = SamplingDistribution::from_real(1.25, 2).unwrap();
        let expect = 0.75 * total_cost(1, &d1, &q).unwrap() + 0.25 * total_cost(2, &d1, &q).unwrap();
        assert!((mixed_cost(&real, &d1, &q).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn marginal_value_examples() {
        let d1 = point(1, 3);
        let v1 = marginal_value(1, &d1, 0.5, TOL).unwrap().finite().unwrap();
        assert!((v1 - 2.0 / 3.0).abs() < 1e-11);
        assert_eq!(marginal_value(0, &d1, 0.5, TOL).unwrap(), MarginalValue::Unbounded);
        assert_eq!(marginal_value(3, &d1, 0.5, TOL).unwrap(), MarginalValue::Finite(0.0));
        assert!(marginal_value(4, &d1, 0.5, TOL).is_err());

        let v12 = marginal_value(5, &point(12, 20), 0.99, TOL).unwrap();
        let v13 = marginal_value(5, &point(13, 20), 0.99, TOL).unwrap();
        assert!(v12 < v13);
    }

    #[test]
    fn unbounded_marginal_value_compares_above_everything() {
        let inf = MarginalValue::Unbounded;
        assert!(inf > MarginalValue::Finite(f64::MAX));
        assert!(inf.at_least(1e300));
        assert!(!inf.at_most(1e300));
        assert_eq!(inf.finite(), None);
    }

    #[test]
    fn truncation_bound_dominates_discarded_mass() {
        for (mu, lambda) in [
            (point(1, 3), 0.9),
            (point(2, 3), 0.95),
            (SamplingDistribution::new(vec![0.3, 0.3, 0.4]).unwrap(), 0.99),
        ] {
            let t = tail_distribution(&mu, lambda, 1e-6).unwrap();
            let mut x = *t.r.last().unwrap();
            let mut discarded = 0.0;
            for _ in 0..100_000 {
                x = lambda * mu.pgf(x);
                discarded += x;
            }
            assert!(discarded <= t.truncation_bound * (1.0 + 1e-12));
            assert!(t.truncation_bound < 1e-6);
            let spec_bound = lambda.powi(t.truncation_k as i32 + 1) / (1.0 - lambda);
            assert!(t.truncation_bound <= spec_bound * (1.0 + 1e-12));
        }
    }

    proptest! {
        #[test]
        fn tail_bounded_by_mm1(mu in arb_mu(5), lambda in 0.05f64..0.97) {
            let t = tail_distribution(&mu, lambda, TOL).unwrap();
            prop_assert_eq!(t.r[0], 1.0);
            for k in 1..t.r.len() {
                prop_assert!(t.r[k] <= t.r[k - 1]);
                prop_assert!(t.r[k] >= 0.0);
                prop_assert!(t.r[k] <= lambda.powi(k as i32) + 1e-12);
            }
        }

        #[test]
        fn wait_is_decreasing_and_convex(mu in arb_mu(6), lambda in 0.05f64..0.97) {
            let t = tail_distribution(&mu, lambda, TOL).unwrap();
            let w: Vec<f64> = (1..=6).map(|l| t.expected_wait(l)).collect();
            for l in 0..5 {
                prop_assert!(w[l] > w[l + 1]);
            }
            for l in 1..5 {
                prop_assert!(t.wait_reduction(l) > t.wait_reduction(l + 1));
            }
        }

        #[test]
        fn cost_bounded_independently_of_l(mu in arb_mu(4), lambda in 0.05f64..0.97,
                                           c in 0.1f64..10.0, c_s in 0.0f64..2.0) {
            let p = GameParams::new(lambda, c, c_s, 4).unwrap();
            for l in 1..=4 {
                let cost = total_cost(l, &mu, &p).unwrap();
                prop_assert!(cost <= c / (1.0 - lambda) + c_s * 4.0 + 1e-9);
            }
        }

        #[test]
        fn dominance_lowers_the_tail(a in arb_mu(4), b in arb_mu(4), lambda in 0.05f64..0.97) {
            let order = stochastic_compare(&a, &b).unwrap();
            prop_assume!(order == StochasticOrder::Le);
            let (ta, tb) = (
                tail_distribution(&a, lambda, TOL).unwrap(),
                tail_distribution(&b, lambda, TOL).unwrap(),
            );
            for k in 0..ta.r.len().min(tb.r.len()) {
                prop_assert!(ta.r[k] >= tb.r[k] - 1e-14);
            }
        }
    }
}
