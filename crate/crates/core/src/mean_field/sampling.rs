use serde::{Deserialize, Serialize};

use super::NORMALIZATION_TOL;
use crate::error::{invalid, Error, Result};

/// A mixed strategy: the probability of sampling `l` queues, `l = 1..=l_max`.
///
/// A real number `s ∈ [1, l_max]` encodes the two-point measure with mass
/// `1 − p` at `⌊s⌋` and `p = s − ⌊s⌋` at `⌊s⌋ + 1`; see
/// [`SamplingDistribution::from_real`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SamplingDistribution {
    mass: Vec<f64>,
}

impl SamplingDistribution {
    /// Builds a distribution from `mass[l - 1] = μ(l)`.
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(invalid("sampling distribution needs at least one entry"));
        }
        if let Some((i, &m)) = mass.iter().enumerate().find(|(_, m)| !(**m >= 0.0 && m.is_finite())) {
            return Err(invalid(format!("mass at l = {} is {m}", i + 1)));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(invalid(format!("masses sum to {total}, expected 1")));
        }
        Ok(Self { mass })
    }

    /// Point mass `δ_l` on `{1..l_max}`.
    pub fn point(l: usize, l_max: usize) -> Result<Self> {
        if l == 0 || l > l_max {
            return Err(invalid(format!("point mass at {l} outside 1..={l_max}")));
        }
        let mut mass = vec![0.0; l_max];
        mass[l - 1] = 1.0;
        Ok(Self { mass })
    }

    /// The two-point measure identified with the real number `s ∈ [1, l_max]`.
    pub fn from_real(s: f64, l_max: usize) -> Result<Self> {
        if !(s >= 1.0 && s <= l_max as f64) {
            return Err(Error::Domain {
                name: "L",
                value: s,
                domain: "[1, l_max]",
            });
        }
        let floor = s.floor();
        let p = s - floor;
        let lo = floor as usize;
        let mut mass = vec![0.0; l_max];
        mass[lo - 1] = 1.0 - p;
        if p > 0.0 {
            mass[lo] = p;
        }
        Ok(Self { mass })
    }

    /// Inverse of [`from_real`](Self::from_real): `Some(s)` when the support
    /// is one integer or two consecutive integers.
    pub fn to_real(&self) -> Option<f64> {
        let mut support = self
            .mass
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .map(|(i, _)| i + 1);
        let lo = support.next()?;
        match support.next() {
            None => Some(lo as f64),
            Some(hi) if hi == lo + 1 && support.next().is_none() => Some(lo as f64 + self.mass[hi - 1]),
            Some(_) => None,
        }
    }

    pub fn l_max(&self) -> usize {
        self.mass.len()
    }

    /// `μ(l)`; zero outside `1..=l_max`.
    pub fn mass(&self, l: usize) -> f64 {
        if l == 0 {
            0.0
        } else {
            self.mass.get(l - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// `(l, μ(l))` for every `l` with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .map(|(i, m)| (i + 1, *m))
    }

    /// `E_μ[L]`.
    pub fn mean(&self) -> f64 {
        self.support().map(|(l, m)| l as f64 * m).sum()
    }

    /// Upper tail sums `Σ_{j ≥ l} μ(j)` for `l = 1..=l_max`.
    pub fn upper_tails(&self) -> Vec<f64> {
        let mut tails = vec![0.0; self.mass.len()];
        let mut acc = 0.0;
        for (i, m) in self.mass.iter().enumerate().rev() {
            acc += m;
            tails[i] = acc;
        }
        tails
    }

    /// `F⁻¹(u)`: the smallest `l` with `Σ_{j ≤ l} μ(j) ≥ u`.
    pub fn inverse_cdf(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, m) in self.mass.iter().enumerate() {
            acc += m;
            if *m > 0.0 && acc >= u {
                return i + 1;
            }
        }
        // u within rounding of 1: fall back to the top of the support.
        self.support().last().map(|(l, _)| l).unwrap_or(1)
    }

    /// Total variation `Σ_l |μ(l) − ν(l)|`.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let n = self.mass.len().max(other.mass.len());
        (1..=n).map(|l| (self.mass(l) - other.mass(l)).abs()).sum()
    }

    /// `(1 − w)·self + w·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.l_max() != other.l_max() {
            return Err(invalid("cannot mix distributions with different l_max"));
        }
        let mass = self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect();
        Ok(Self { mass })
    }

    /// `u_μ(x)` without domain checks (Horner form).
    pub(crate) fn pgf(&self, x: f64) -> f64 {
        self.mass.iter().rev().fold(0.0, |acc, m| (acc + m) * x)
    }

    /// Rescales a vector that is a probability vector up to rounding.
    pub(crate) fn from_unnormalized(mut mass: Vec<f64>) -> Result<Self> {
        for m in &mut mass {
            if *m < 0.0 && *m > -1e-12 {
                *m = 0.0;
            }
        }
        let total: f64 = mass.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("distribution has no mass"));
        }
        mass.iter_mut().for_each(|m| *m /= total);
        Self::new(mass)
    }
}

impl TryFrom<Vec<f64>> for SamplingDistribution {
    type Error = Error;

    fn try_from(mass: Vec<f64>) -> Result<Self> {
        Self::new(mass)
    }
}

impl From<SamplingDistribution> for Vec<f64> {
    fn from(mu: SamplingDistribution) -> Self {
        mu.mass
    }
}

/// Probability generating function `u_μ(x) = Σ_l μ(l) x^l` for `x ∈ [0, 1]`.
pub fn pgf_eval(mu: &SamplingDistribution, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(mu.pgf(x))
}

/// First-order stochastic ordering between two sampling distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StochasticOrder {
    /// `μ1 ≤st μ2` and not equal.
    Le,
    /// `μ1 ≥st μ2` and not equal.
    Ge,
    Eq,
    Incomparable,
}

/// Compares upper tail sums of `mu1` and `mu2` (tolerance `1e-12`).
pub fn stochastic_compare(mu1: &SamplingDistribution, mu2: &SamplingDistribution) -> Result<StochasticOrder> {
    if mu1.l_max() != mu2.l_max() {
        return Err(invalid(format!("l_max mismatch: {} vs {}", mu1.l_max(), mu2.l_max())));
    }
    let (t1, t2) = (mu1.upper_tails(), mu2.upper_tails());
    let le = t1.iter().zip(&t2).all(|(a, b)| *a <= b + NORMALIZATION_TOL);
    let ge = t1.iter().zip(&t2).all(|(a, b)| *a + NORMALIZATION_TOL >= *b);
    Ok(match (le, ge) {
        (true, true) => StochasticOrder::Eq,
        (true, false) => StochasticOrder::Le,
        (false, true) => StochasticOrder::Ge,
        (false, false) => StochasticOrder::Incomparable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_mass(a: f64, b: f64) -> SamplingDistribution {
        SamplingDistribution::new(vec![a, b]).unwrap()
    }

    #[test]
    fn pgf_examples() {
        let d1 = SamplingDistribution::point(1, 1).unwrap();
        assert_eq!(pgf_eval(&d1, 0.5).unwrap(), 0.5);
        assert_eq!(pgf_eval(&two_mass(0.5, 0.5), 0.5).unwrap(), 0.375);
        let d2 = SamplingDistribution::point(2, 2).unwrap();
        assert!((pgf_eval(&d2, 0.9).unwrap() - 0.81).abs() < 1e-15);
    }

    #[test]
    fn pgf_rejects_outside_unit_interval() {
        let d1 = SamplingDistribution::point(1, 1).unwrap();
        assert!(pgf_eval(&d1, 1.5).is_err());
        assert!(pgf_eval(&d1, -0.1).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(SamplingDistribution::new(vec![]).is_err());
        assert!(SamplingDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(SamplingDistribution::new(vec![1.1, -0.1]).is_err());
        assert!(SamplingDistribution::point(0, 3).is_err());
        assert!(SamplingDistribution::point(4, 3).is_err());
        assert!(SamplingDistribution::from_real(0.5, 3).is_err());
        assert!(SamplingDistribution::from_real(3.5, 3).is_err());
    }

    #[test]
    fn real_encoding() {
        let mu = SamplingDistribution::from_real(1.25, 3).unwrap();
        assert_eq!(mu.masses(), &[0.75, 0.25, 0.0]);
        assert_eq!(mu.to_real(), Some(1.25));
        let top = SamplingDistribution::from_real(3.0, 3).unwrap();
        assert_eq!(top.masses(), &[0.0, 0.0, 1.0]);
        let spread = SamplingDistribution::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(spread.to_real(), None);
    }

    #[test]
    fn comparison_examples() {
        let d1 = SamplingDistribution::point(1, 3).unwrap();
        let d2 = SamplingDistribution::point(2, 3).unwrap();
        let spread = SamplingDistribution::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(stochastic_compare(&d1, &d2).unwrap(), StochasticOrder::Le);
        assert_eq!(stochastic_compare(&d2, &d1).unwrap(), StochasticOrder::Ge);
        assert_eq!(stochastic_compare(&d2, &d2).unwrap(), StochasticOrder::Eq);
        assert_eq!(stochastic_compare(&spread, &d2).unwrap(), StochasticOrder::Incomparable);
        let short = SamplingDistribution::point(1, 2).unwrap();
        assert!(stochastic_compare(&d1, &short).is_err());
    }

    #[test]
    fn inverse_cdf_skips_empty_levels() {
        let mu = SamplingDistribution::new(vec![0.25, 0.0, 0.75]).unwrap();
        assert_eq!(mu.inverse_cdf(0.0), 1);
        assert_eq!(mu.inverse_cdf(0.25), 1);
        assert_eq!(mu.inverse_cdf(0.2500001), 3);
        assert_eq!(mu.inverse_cdf(1.0), 3);
    }

    proptest! {
        #[test]
        fn real_round_trip_is_exact(s in 1.0f64..=9.0) {
            let mu = SamplingDistribution::from_real(s, 9).unwrap();
            prop_assert_eq!(mu.to_real(), Some(s));
        }

        #[test]
        fn pgf_is_monotone_and_bounded(raw in prop::collection::vec(0.0f64..1.0, 1..8),
                                       x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
            prop_assume!(raw.iter().sum::<f64>() > 1e-3);
            let mu = SamplingDistribution::from_unnormalized(raw).unwrap();
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            let (a, b) = (pgf_eval(&mu, lo).unwrap(), pgf_eval(&mu, hi).unwrap());
            prop_assert!((0.0..=1.0 + 1e-15).contains(&a));
            prop_assert!(a <= b + 1e-15);
        }
    }
}
