use serde::{Deserialize, Serialize};

use super::tie_tolerance;
use crate::error::{invalid, Result};
use crate::mean_field::{check_lambda, tail_distribution, GameParams, SamplingDistribution, DEFAULT_TOL};

/// Best response when at most two queues can be sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoChoiceResponse {
    One,
    Two,
    /// Indifferent: every mixture of one and two samples is optimal.
    Interval,
}

/// `V(1, 1+q) = Σ_k r_q(k)(1 − r_q(k))` when a fraction `q` of the
/// population samples two queues.
pub fn two_choice_marginal_value(q: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("q must lie in [0, 1], got {q}")));
    }
    let mu = SamplingDistribution::from_real(1.0 + q, 2)?;
    Ok(tail_distribution(&mu, lambda, DEFAULT_TOL)?.wait_reduction(1))
}

pub fn two_choice_best_response(q: f64, params: &GameParams) -> Result<TwoChoiceResponse> {
    params.validate()?;
    if params.l_max != 2 {
        return Err(invalid(format!(
            "two-choice game needs l_max = 2, got {}",
            params.l_max
        )));
    }
    let v = two_choice_marginal_value(q, params.lambda)?;
    let ratio = params.cost_ratio();
    Ok(if (v - ratio).abs() <= tie_tolerance(ratio) {
        TwoChoiceResponse::Interval
    } else if ratio > v {
        TwoChoiceResponse::One
    } else {
        TwoChoiceResponse::Two
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{best_response, bisect, BestResponseKind};
    use proptest::prelude::*;

    fn params(lambda: f64, ratio: f64) -> GameParams {
        GameParams::with_ratio(lambda, ratio, 2).unwrap()
    }

    #[test]
    fn analytic_cases() {
        assert!((two_choice_marginal_value(0.0, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-11);
        assert_eq!(
            two_choice_best_response(0.0, &params(0.5, 1.0)).unwrap(),
            TwoChoiceResponse::One
        );
        assert_eq!(
            two_choice_best_response(0.0, &params(0.5, 0.5)).unwrap(),
            TwoChoiceResponse::Two
        );
    }

    #[test]
    fn root_gives_interval() {
        let lambda = 0.9;
        let (v0, v1) = (
            two_choice_marginal_value(0.0, lambda).unwrap(),
            two_choice_marginal_value(1.0, lambda).unwrap(),
        );
        let ratio = 0.5 * (v0 + v1);
        // Independent check that there is exactly one sign change on a fine grid.
        let signs: Vec<bool> = (0..=2000)
            .map(|i| two_choice_marginal_value(i as f64 / 2000.0, lambda).unwrap() > ratio)
            .collect();
        assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 1);
        let q = bisect(0.0, 1.0, v0 - ratio, 1e-14, |q| {
            Ok(two_choice_marginal_value(q, lambda)? - ratio)
        })
        .unwrap();
        assert_eq!(
            two_choice_best_response(q, &params(lambda, ratio)).unwrap(),
            TwoChoiceResponse::Interval
        );
    }

    #[test]
    fn needs_two_levels() {
        assert!(two_choice_best_response(0.5, &GameParams::with_ratio(0.5, 0.1, 3).unwrap()).is_err());
        assert!(two_choice_marginal_value(1.5, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_general_best_response(q in 0.0f64..=1.0, lambda in 0.01f64..0.99, ratio in 0.0f64..1.2) {
            let p = params(lambda, ratio);
            let mu = SamplingDistribution::from_real(1.0 + q, 2).unwrap();
            let general = best_response(&mu, &p).unwrap();
            let expected = match (general.kind, general.lo as usize) {
                (BestResponseKind::Interval, _) => TwoChoiceResponse::Interval,
                (_, 1) => TwoChoiceResponse::One,
                _ => TwoChoiceResponse::Two,
            };
            prop_assert_eq!(two_choice_best_response(q, &p).unwrap(), expected);
        }
    }
}
