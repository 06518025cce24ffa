use serde::{Deserialize, Serialize};

use super::MIN_Q_GRID;
use crate::error::{invalid, Result};
use crate::mean_field::check_lambda;
use crate::mean_field::{tail_distribution, SamplingDistribution, DEFAULT_TOL};

/// Differences smaller than this are treated as flat.
pub const DIFF_TOL: f64 = 1e-11;

/// Shape of `q ↦ V(L, L+q)` on `[0, 1]` as seen on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotonicityVerdict {
    Decreasing,
    Increasing,
    NonMonotone,
    /// Every grid difference is below the flatness tolerance and no
    /// analytic argument applies.
    Unresolved,
}

/// Numerical diagnosis for one integer `L`. This is grid evidence, not a
/// proof, except where `certified` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMonotonicity {
    pub l: usize,
    pub verdict: MonotonicityVerdict,
    /// `λ^(L+1) ≤ L/(L+1)`: every tail entry past index 1 then sits where
    /// `x ↦ x^L (1−x)` is increasing, so `V(L, L+q)` strictly decreases.
    pub certified: bool,
    pub max_rise: f64,
    pub max_fall: f64,
}

/// Rows of `V(L, L + j/q_grid)` for `L = 1..l_max−1`, `j = 0..=q_grid`.
pub(crate) fn value_grid(lambda: f64, l_max: usize, q_grid: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(l_max.saturating_sub(1));
    for l in 1..l_max {
        let mut row = Vec::with_capacity(q_grid + 1);
        for j in 0..=q_grid {
            let s = l as f64 + j as f64 / q_grid as f64;
            let mu = SamplingDistribution::from_real(s, l_max)?;
            row.push(tail_distribution(&mu, lambda, DEFAULT_TOL)?.wait_reduction(l));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub(crate) fn certificate(lambda: f64, l: usize) -> bool {
    lambda.powi(l as i32 + 1) <= l as f64 / (l as f64 + 1.0)
}

pub(crate) fn classify(l: usize, row: &[f64], certified: bool) -> LocalMonotonicity {
    let (mut max_rise, mut max_fall) = (0.0f64, 0.0f64);
    let (mut ups, mut downs) = (0usize, 0usize);
    for w in row.windows(2) {
        let d = w[1] - w[0];
        max_rise = max_rise.max(d);
        max_fall = max_fall.max(-d);
        if d > DIFF_TOL {
            ups += 1;
        } else if d < -DIFF_TOL {
            downs += 1;
        }
    }
    let verdict = match (ups > 0, downs > 0) {
        (false, true) => MonotonicityVerdict::Decreasing,
        (true, false) => MonotonicityVerdict::Increasing,
        (true, true) => MonotonicityVerdict::NonMonotone,
        (false, false) if certified => MonotonicityVerdict::Decreasing,
        (false, false) => MonotonicityVerdict::Unresolved,
    };
    LocalMonotonicity {
        l,
        verdict,
        certified,
        max_rise,
        max_fall,
    }
}

pub(crate) fn check_q_grid(q_grid: usize) -> Result<()> {
    if q_grid < MIN_Q_GRID {
        return Err(invalid(format!("q_grid must be >= {MIN_Q_GRID}, got {q_grid}")));
    }
    Ok(())
}

/// Classifies `q ↦ V(L, L+q)` for each `L = 1..l_max−1` from its values on
/// `q_grid + 1` equally spaced points.
pub fn check_local_monotonicity(lambda: f64, l_max: usize, q_grid: usize) -> Result<Vec<LocalMonotonicity>> {
    check_lambda(lambda)?;
    check_q_grid(q_grid)?;
    if l_max == 0 {
        return Err(invalid("l_max must be >= 1"));
    }
    let rows = value_grid(lambda, l_max, q_grid)?;
    Ok(rows
        .iter()
        .enumerate()
        .map(|(i, row)| classify(i + 1, row, certificate(lambda, i + 1)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use MonotonicityVerdict::*;

    #[test]
    fn low_load_is_decreasing_everywhere() {
        for v in check_local_monotonicity(0.7, 12, 200).unwrap() {
            assert_eq!(v.verdict, Decreasing, "L={}", v.l);
            assert!(v.certified);
        }
    }

    #[test]
    fn heavy_load_increasing_band() {
        let verdicts = check_local_monotonicity(0.999, 25, 200).unwrap();
        for v in &verdicts[17..24] {
            assert_eq!(v.verdict, Increasing, "L={}", v.l);
        }
        assert_ne!(verdicts[15].verdict, Increasing);
    }

    #[test]
    fn eight_at_099_turns_near_the_top() {
        // A high-precision evaluation gives V(8, 8.83) = 0.0524120953704533
        // and V(8, 9) = 0.0524168658512130, so the curve rises near q = 1.
        let verdicts = check_local_monotonicity(0.99, 10, 1000).unwrap();
        let eight = &verdicts[7];
        assert_eq!(eight.verdict, NonMonotone);
        assert!(eight.max_rise > 1e-8 && eight.max_rise < 1e-7);
        for v in &verdicts[..7] {
            assert_eq!(v.verdict, Decreasing, "L={}", v.l);
        }
    }

    #[test]
    fn certificate_threshold() {
        assert!(certificate(0.707, 1));
        assert!(!certificate(0.8, 1));
        assert!(certificate(0.99, 10));
        assert!(!certificate(0.99, 8));
    }

    #[test]
    fn flat_rows() {
        let flat = vec![0.5; 11];
        assert_eq!(classify(3, &flat, true).verdict, Decreasing);
        assert_eq!(classify(3, &flat, false).verdict, Unresolved);
        assert_eq!(classify(1, &[1.0, 0.9, 0.95], false).verdict, NonMonotone);
    }

    #[test]
    fn rejects_coarse_grid() {
        assert!(check_local_monotonicity(0.5, 4, 99).is_err());
    }
}
