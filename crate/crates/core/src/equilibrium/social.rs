use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mean_field::{mixed_cost, GameParams, SamplingDistribution};

/// Coarse cells per unit interval before golden-section refinement.
const COARSE_CELLS: usize = 20;

/// Relative gap under which two interval minima count as tied.
const NEAR_TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialOptimum {
    /// Minimizing strategy as a real number in `[1, l_max]`.
    pub value: f64,
    /// Population cost `λ·C(μ, μ)` at the minimizer.
    pub cost: f64,
    /// Other strategies whose cost is within `1e-9` (relative) of the minimum.
    pub near_ties: Vec<f64>,
    /// Best point found in each unit interval `[L, L+1]`, as `(s, cost)`.
    pub interval_minima: Vec<(f64, f64)>,
}

/// `λ·C(μ_s, μ_s)`: the cost rate of the whole population when everyone
/// plays the real strategy `s`. The tail is recomputed for each `s`.
pub fn social_objective(s: f64, params: &GameParams) -> Result<f64> {
    let mu = SamplingDistribution::from_real(s, params.l_max)?;
    Ok(params.lambda * mixed_cost(&mu, &mu, params)?)
}

/// Minimizes [`social_objective`] over `[1, l_max]`, one golden-section
/// search per unit interval (the objective is not known to be convex).
pub fn social_optimum(params: &GameParams, refine_tol: f64) -> Result<SocialOptimum> {
    params.validate()?;
    if !(refine_tol > 0.0) {
        return Err(invalid(format!("refine_tol must be > 0, got {refine_tol}")));
    }
    let l_max = params.l_max;
    let f = |s: f64| social_objective(s, params);
    if l_max == 1 || params.c_s == 0.0 {
        // Waits fall in both the own and the population sample count.
        let s = l_max as f64;
        return Ok(SocialOptimum {
            value: s,
            cost: f(s)?,
            near_ties: Vec::new(),
            interval_minima: Vec::new(),
        });
    }

    let mut minima = Vec::with_capacity(l_max - 1);
    for l in 1..l_max {
        let base = l as f64;
        let h = 1.0 / COARSE_CELLS as f64;
        let mut grid = Vec::with_capacity(COARSE_CELLS + 1);
        for j in 0..=COARSE_CELLS {
            let s = if j == COARSE_CELLS {
                base + 1.0
            } else {
                base + j as f64 * h
            };
            grid.push((s, f(s)?));
        }
        let (j_best, _) = grid
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("grid is nonempty");
        let lo = grid[j_best.saturating_sub(1)].0;
        let hi = grid[(j_best + 1).min(COARSE_CELLS)].0;
        let refined = golden_section(lo, hi, refine_tol, &f)?;
        let best = [grid[j_best], refined]
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("two candidates");
        minima.push(best);
    }

    let &(value, cost) = minima
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one interval");
    let near_ties = minima
        .iter()
        .filter(|(s, c)| (s - value).abs() > 10.0 * refine_tol && (c - cost).abs() <= NEAR_TIE * cost.abs().max(1.0))
        .map(|(s, _)| *s)
        .collect();
    Ok(SocialOptimum {
        value,
        cost,
        near_ties,
        interval_minima: minima,
    })
}

fn golden_section(mut a: f64, mut b: f64, tol: f64, f: &impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::enumerate_nash;
    use proptest::prelude::*;

    fn params(lambda: f64, ratio: f64, l_max: usize) -> GameParams {
        GameParams::with_ratio(lambda, ratio, l_max).unwrap()
    }

    #[test]
    fn free_sampling_optimum_is_the_top() {
        assert_eq!(social_optimum(&params(0.9, 0.0, 6), 1e-8).unwrap().value, 6.0);
    }

    #[test]
    fn expensive_sampling_optimum_is_one() {
        let opt = social_optimum(&params(0.5, 5.0, 4), 1e-8).unwrap();
        assert_eq!(opt.value, 1.0);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(0.0, 1.0, 1e-10, &|x| Ok((x - 0.3) * (x - 0.3))).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx < 1e-18);
    }

    #[test]
    fn optimum_beats_a_fine_scan() {
        let p = params(0.9, 0.05, 4);
        let opt = social_optimum(&p, 1e-9).unwrap();
        for i in 0..=3000 {
            let s = 1.0 + i as f64 * 0.001;
            assert!(opt.cost <= social_objective(s, &p).unwrap() + 1e-12, "s={s}");
        }
    }

    #[test]
    fn heavy_load_optimum_is_above_every_equilibrium() {
        let p = params(0.999, 0.0148, 25);
        let opt = social_optimum(&p, 1e-8).unwrap();
        let report = enumerate_nash(&p, 100).unwrap();
        let top = report.equilibria.last().unwrap().value;
        assert!(opt.value >= top, "{} < {top}", opt.value);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn no_equilibrium_above_optimum(lambda in 0.05f64..0.98, log_ratio in -4.0f64..0.3, l_max in 2usize..7) {
            let p = params(lambda, 10f64.powf(log_ratio), l_max);
            let opt = social_optimum(&p, 1e-9).unwrap();
            for eq in enumerate_nash(&p, 100).unwrap().equilibria {
                prop_assert!(eq.value <= opt.value + 1e-8, "NE {} above optimum {}", eq.value, opt.value);
            }
        }
    }
}
