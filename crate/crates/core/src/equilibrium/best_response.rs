use serde::{Deserialize, Serialize};

use super::{tie_tolerance, value_against, verify_tolerance};
use crate::error::Result;
use crate::mean_field::{tail_distribution, GameParams, SamplingDistribution, DEFAULT_TOL};

/// Shape of a best-response set.
///
/// Against a fixed opponent the set is either one integer or, when
/// `V(l, μ) = c_s/c`, the whole interval `[l, l+1]`: any mixture of `l` and
/// `l+1` is then optimal, so an isolated non-integer response never occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BestResponseKind {
    SingleInteger,
    Interval,
}

/// `BR(μ)` as a real interval `[lo, hi]` of two-point strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponseSet {
    pub lo: f64,
    pub hi: f64,
    pub kind: BestResponseKind,
}

impl BestResponseSet {
    pub fn contains(&self, s: f64, tol: f64) -> bool {
        s >= self.lo - tol && s <= self.hi + tol
    }
}

/// Minimizers of `l ↦ C(l, μ)` via the threshold test on `V(l, μ)`.
pub fn best_response(mu: &SamplingDistribution, params: &GameParams) -> Result<BestResponseSet> {
    params.validate()?;
    let l_max = params.l_max;
    if mu.l_max() != l_max {
        return Err(crate::Error::InvalidParameter(format!(
            "distribution has l_max {} but parameters say {l_max}",
            mu.l_max()
        )));
    }
    let ratio = params.cost_ratio();
    let tie = tie_tolerance(ratio);
    let tail = tail_distribution(mu, params.lambda, DEFAULT_TOL)?;
    for l in 1..=l_max {
        let v = tail.marginal_value(l, l_max);
        if v.at_most(ratio + tie) {
            let is_tie = l < l_max && v.finite().is_some_and(|v| (v - ratio).abs() <= tie);
            return Ok(if is_tie {
                BestResponseSet {
                    lo: l as f64,
                    hi: (l + 1) as f64,
                    kind: BestResponseKind::Interval,
                }
            } else {
                BestResponseSet {
                    lo: l as f64,
                    hi: l as f64,
                    kind: BestResponseKind::SingleInteger,
                }
            });
        }
    }
    unreachable!("V(l_max) = 0 always passes the threshold test")
}

/// Checks `s ∈ BR(s)` with the marginal-value characterization. Returns a
/// description of the failed inequality on rejection.
pub fn is_best_response_to_itself(s: f64, params: &GameParams) -> Result<std::result::Result<(), String>> {
    let ratio = params.cost_ratio();
    let tol = verify_tolerance(ratio);
    let l_max = params.l_max;
    if s.fract() == 0.0 {
        let l = s as usize;
        let here = value_against(l, s, params.lambda, l_max)?;
        let below = value_against(l - 1, s, params.lambda, l_max)?;
        if !here.at_most(ratio + tol) {
            return Ok(Err(format!("V({l}, {s}) = {here:?} > c_s/c = {ratio}")));
        }
        if !below.at_least(ratio - tol) {
            return Ok(Err(format!("V({}, {s}) = {below:?} < c_s/c = {ratio}", l - 1)));
        }
        Ok(Ok(()))
    } else {
        let l = s.floor() as usize;
        let v = value_against(l, s, params.lambda, l_max)?;
        match v.finite() {
            Some(v) if (v - ratio).abs() <= tol => Ok(Ok(())),
            _ => Ok(Err(format!("V({l}, {s}) = {v:?} != c_s/c = {ratio}"))),
        }
    }
}
