use serde::{Deserialize, Serialize};

use super::monotonicity::{certificate, check_q_grid, classify, value_grid};
use super::{bisect, is_best_response_to_itself, value_against, LocalMonotonicity, MonotonicityVerdict, BISECTION_TOL};
use crate::error::{Error, Result};
use crate::mean_field::GameParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Pure,
    Mixed,
}

/// A symmetric equilibrium, given as the real number encoding its
/// two-point sampling distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub value: f64,
    pub kind: EquilibriumKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub lambda: f64,
    pub cost_ratio: f64,
    pub l_max: usize,
    pub q_grid: usize,
    /// Sorted by value.
    pub equilibria: Vec<Equilibrium>,
    pub monotonicity: Vec<LocalMonotonicity>,
    /// Set when `λ² ≤ 1/2` or every verdict is decreasing.
    pub unique_guaranteed: bool,
    pub warnings: Vec<String>,
}

fn verified(s: f64, params: &GameParams) -> Result<f64> {
    match is_best_response_to_itself(s, params)? {
        Ok(()) => Ok(s),
        Err(reason) => Err(Error::NashVerification { candidate: s, reason }),
    }
}

/// One symmetric equilibrium by the constructive existence argument:
///
/// 1. if `V(l_max−1, l_max) ≥ c_s/c`, return `l_max`;
/// 2. otherwise let `L̂` be the smallest `L` with `V(L, L+1) < c_s/c`;
///    return `L̂` if `V(L̂, L̂) ≤ c_s/c`;
/// 3. otherwise bisect `V(L̂, L̂+q) = c_s/c` over `q ∈ (0, 1)`.
///
/// The result is re-checked against the best-response characterization.
pub fn find_nash(params: &GameParams) -> Result<f64> {
    params.validate()?;
    let (lambda, l_max, ratio) = (params.lambda, params.l_max, params.cost_ratio());
    if l_max == 1 || value_against(l_max - 1, l_max as f64, lambda, l_max)?.at_least(ratio) {
        return verified(l_max as f64, params);
    }
    let mut l_hat = l_max - 1;
    for l in 1..l_max {
        if !value_against(l, (l + 1) as f64, lambda, l_max)?.at_least(ratio) {
            l_hat = l;
            break;
        }
    }
    let at_self = value_against(l_hat, l_hat as f64, lambda, l_max)?;
    if at_self.at_most(ratio) {
        return verified(l_hat as f64, params);
    }
    let base = l_hat as f64;
    let g = |q: f64| -> Result<f64> {
        let v = value_against(l_hat, base + q, lambda, l_max)?;
        Ok(v.finite().expect("finite for l >= 1") - ratio)
    };
    let g0 = g(0.0)?;
    let q = bisect(0.0, 1.0, g0, BISECTION_TOL, g)?;
    verified(base + q, params)
}

/// Every symmetric equilibrium visible on a grid of `q_grid` cells per unit
/// interval, plus the local monotonicity diagnosis from the same grid.
///
/// Pure equilibria are integers `L` with `V(L, L) ≤ c_s/c ≤ V(L−1, L)`.
/// Mixed ones are interior sign changes of `q ↦ V(L, L+q) − c_s/c`, refined
/// by bisection. Two roots inside one cell cannot be seen; a warning is
/// added where the curve turns close to the threshold.
pub fn enumerate_nash(params: &GameParams, q_grid: usize) -> Result<EquilibriumReport> {
    params.validate()?;
    check_q_grid(q_grid)?;
    let (lambda, l_max, ratio) = (params.lambda, params.l_max, params.cost_ratio());
    let rows = value_grid(lambda, l_max, q_grid)?;
    let mut equilibria = Vec::new();
    let mut warnings = Vec::new();

    for l in 1..=l_max {
        let here = if l < l_max { rows[l - 1][0] } else { 0.0 };
        let below_ok = l == 1 || rows[l - 2][q_grid] >= ratio;
        if here <= ratio && below_ok {
            equilibria.push(Equilibrium {
                value: verified(l as f64, params)?,
                kind: EquilibriumKind::Pure,
            });
        }
    }

    for (i, row) in rows.iter().enumerate() {
        let l = i + 1;
        let base = l as f64;
        let g = |q: f64| -> Result<f64> {
            let v = value_against(l, base + q, lambda, l_max)?;
            Ok(v.finite().expect("finite for l >= 1") - ratio)
        };
        let cell = 1.0 / q_grid as f64;
        for j in 0..q_grid {
            let (a, b) = (row[j] - ratio, row[j + 1] - ratio);
            if j > 0 && a == 0.0 {
                push_mixed(&mut equilibria, base + j as f64 * cell, params)?;
            } else if a * b < 0.0 {
                let q = bisect(j as f64 * cell, (j + 1) as f64 * cell, a, BISECTION_TOL, g)?;
                push_mixed(&mut equilibria, base + q, params)?;
            }
            if j > 0 {
                let (d_prev, d_next) = (row[j] - row[j - 1], row[j + 1] - row[j]);
                let turning = d_prev * d_next < 0.0;
                let prev = row[j - 1] - ratio;
                let same_side = prev * a > 0.0 && a * b > 0.0;
                if turning && same_side && a.abs() <= d_prev.abs().max(d_next.abs()) {
                    warnings.push(format!(
                        "V({l}, {l}+q) turns within one cell of the threshold near q = {:.6}; \
                         grid may be too coarse to separate roots",
                        j as f64 * cell
                    ));
                }
            }
        }
    }
    equilibria.sort_by(|a, b| a.value.total_cmp(&b.value));

    let monotonicity: Vec<LocalMonotonicity> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| classify(i + 1, row, certificate(lambda, i + 1)))
        .collect();
    let unique_guaranteed = lambda * lambda <= 0.5
        || monotonicity
            .iter()
            .all(|m| m.verdict == MonotonicityVerdict::Decreasing);

    Ok(EquilibriumReport {
        lambda,
        cost_ratio: ratio,
        l_max,
        q_grid,
        equilibria,
        monotonicity,
        unique_guaranteed,
        warnings,
    })
}

fn push_mixed(out: &mut Vec<Equilibrium>, s: f64, params: &GameParams) -> Result<()> {
    out.push(Equilibrium {
        value: verified(s, params)?,
        kind: EquilibriumKind::Mixed,
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(lambda: f64, ratio: f64, l_max: usize) -> GameParams {
        GameParams::with_ratio(lambda, ratio, l_max).unwrap()
    }

    #[test]
    fn free_sampling_goes_to_the_top() {
        for lambda in [0.3, 0.9, 0.999] {
            assert_eq!(find_nash(&params(lambda, 0.0, 7)).unwrap(), 7.0);
        }
    }

    #[test]
    fn costly_sampling_gives_one() {
        assert_eq!(find_nash(&params(0.5, 1.0, 5)).unwrap(), 1.0);
        let report = enumerate_nash(&params(0.5, 1.0, 5), 200).unwrap();
        assert_eq!(
            report.equilibria,
            vec![Equilibrium {
                value: 1.0,
                kind: EquilibriumKind::Pure
            }]
        );
    }

    #[test]
    fn heavy_load_find_lands_in_the_pure_band() {
        let s = find_nash(&params(0.999, 0.0148, 25)).unwrap();
        assert!((19.0..=24.0).contains(&s), "{s}");
    }

    #[test]
    fn heavy_load_enumeration() {
        let report = enumerate_nash(&params(0.999, 0.0148, 25), 200).unwrap();
        let pure: Vec<f64> = report
            .equilibria
            .iter()
            .filter(|e| e.kind == EquilibriumKind::Pure)
            .map(|e| e.value)
            .collect();
        assert_eq!(pure, vec![19.0, 20.0, 21.0, 22.0, 23.0, 24.0]);
        for l in 19..24 {
            assert!(report
                .equilibria
                .iter()
                .any(|e| e.kind == EquilibriumKind::Mixed && e.value > l as f64 && e.value < (l + 1) as f64));
        }
        assert!(!report.unique_guaranteed);
    }

    #[test]
    fn mixed_equilibrium_when_threshold_falls_inside_an_interval() {
        // Ratio strictly between V(1, 2) and V(1, 1): the root lies inside (1, 2).
        let lambda = 0.6;
        let hi = value_against(1, 1.0, lambda, 3).unwrap().finite().unwrap();
        let lo = value_against(1, 2.0, lambda, 3).unwrap().finite().unwrap();
        let p = params(lambda, 0.5 * (hi + lo), 3);
        let s = find_nash(&p).unwrap();
        assert!(s > 1.0 && s < 2.0);
        let report = enumerate_nash(&p, 100).unwrap();
        assert_eq!(report.equilibria.len(), 1);
        assert_eq!(report.equilibria[0].kind, EquilibriumKind::Mixed);
        assert!((report.equilibria[0].value - s).abs() < 1e-9);
    }

    #[test]
    fn enumerate_rejects_coarse_grid() {
        assert!(enumerate_nash(&params(0.5, 0.1, 4), 50).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn existence_and_fixed_point(lambda in 0.05f64..0.98, ratio in 0.0f64..1.0, l_max in 1usize..8) {
            let p = params(lambda, ratio, l_max);
            let report = enumerate_nash(&p, 100).unwrap();
            prop_assert!(!report.equilibria.is_empty());
            let s = find_nash(&p).unwrap();
            prop_assert!(is_best_response_to_itself(s, &p).unwrap().is_ok());
            if report.unique_guaranteed {
                prop_assert_eq!(report.equilibria.len(), 1);
                prop_assert!((report.equilibria[0].value - s).abs() < 1e-8);
            }
        }

        #[test]
        fn unique_at_low_load(lambda in 0.05f64..std::f64::consts::FRAC_1_SQRT_2, log_ratio in -4.0f64..0.5) {
            let report = enumerate_nash(&params(lambda, 10f64.powf(log_ratio), 8), 100).unwrap();
            prop_assert!(report.unique_guaranteed);
            prop_assert_eq!(report.equilibria.len(), 1);
        }
    }
}
