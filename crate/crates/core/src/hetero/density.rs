use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Allowed deviation of the total mass from 1.
pub const MASS_TOL: f64 = 1e-10;

/// Continuous density of waiting costs on `[0, c_max]`.
///
/// Piecewise-linear densities are given by `(position, density)` knots with
/// the first position at 0 and the last at `c_max`; the density is linear
/// between consecutive knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostDensity {
    Uniform { c_max: f64 },
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl CostDensity {
    pub fn uniform(c_max: f64) -> Result<Self> {
        let f = CostDensity::Uniform { c_max };
        f.validate()?;
        Ok(f)
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        let f = CostDensity::PiecewiseLinear { knots };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CostDensity::Uniform { c_max } => {
                if !(*c_max > 0.0 && c_max.is_finite()) {
                    return Err(invalid(format!("c_max must be > 0, got {c_max}")));
                }
            }
            CostDensity::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return Err(invalid("piecewise-linear density needs at least two knots"));
                }
                if knots[0].0 != 0.0 {
                    return Err(invalid("first knot must sit at cost 0"));
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) || !w[1].0.is_finite() {
                        return Err(invalid("knot positions must be strictly increasing"));
                    }
                }
                for &(x, d) in knots {
                    if !(d >= 0.0 && d.is_finite()) {
                        return Err(invalid(format!("density at {x} must be finite and >= 0, got {d}")));
                    }
                }
                let mass = self.cdf(self.c_max());
                if (mass - 1.0).abs() > MASS_TOL {
                    return Err(invalid(format!("density integrates to {mass}, not 1")));
                }
            }
        }
        Ok(())
    }

    pub fn c_max(&self) -> f64 {
        match self {
            CostDensity::Uniform { c_max } => *c_max,
            CostDensity::PiecewiseLinear { knots } => knots.last().map_or(0.0, |k| k.0),
        }
    }

    pub fn density(&self, c: f64) -> f64 {
        match self {
            CostDensity::Uniform { c_max } => {
                if (0.0..=*c_max).contains(&c) {
                    1.0 / c_max
                } else {
                    0.0
                }
            }
            CostDensity::PiecewiseLinear { knots } => {
                if c < 0.0 || c > self.c_max() {
                    return 0.0;
                }
                let i = segment_of(knots, c);
                let ((x0, d0), (x1, d1)) = (knots[i], knots[i + 1]);
                d0 + (d1 - d0) * (c - x0) / (x1 - x0)
            }
        }
    }

    /// `F(c) = ∫_0^c f`, exact per segment.
    pub fn cdf(&self, c: f64) -> f64 {
        match self {
            CostDensity::Uniform { c_max } => (c / c_max).clamp(0.0, 1.0),
            CostDensity::PiecewiseLinear { knots } => {
                if c <= 0.0 {
                    return 0.0;
                }
                let c = c.min(self.c_max());
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let ((x0, d0), (x1, d1)) = (w[0], w[1]);
                    if c >= x1 {
                        acc += 0.5 * (d0 + d1) * (x1 - x0);
                    } else {
                        let t = c - x0;
                        let slope = (d1 - d0) / (x1 - x0);
                        acc += d0 * t + 0.5 * slope * t * t;
                        break;
                    }
                }
                acc
            }
        }
    }

    /// Fails when the density vanishes on a whole segment, where the
    /// inverse CDF is not unique.
    pub fn check_positive(&self) -> Result<()> {
        if let CostDensity::PiecewiseLinear { knots } = self {
            for w in knots.windows(2) {
                if w[0].1 == 0.0 && w[1].1 == 0.0 {
                    return Err(Error::DegenerateDensity(format!(
                        "density vanishes on [{}, {}]",
                        w[0].0, w[1].0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Smallest `c` with `F(c) = p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain {
                name: "p",
                value: p,
                domain: "[0, 1]",
            });
        }
        self.check_positive()?;
        match self {
            CostDensity::Uniform { c_max } => Ok(p * c_max),
            CostDensity::PiecewiseLinear { knots } => {
                if p == 0.0 {
                    return Ok(0.0);
                }
                if p >= self.cdf(self.c_max()) {
                    return Ok(self.c_max());
                }
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let ((x0, d0), (x1, d1)) = (w[0], w[1]);
                    let seg = 0.5 * (d0 + d1) * (x1 - x0);
                    if acc + seg >= p {
                        let delta = p - acc;
                        if delta <= 0.0 {
                            return Ok(x0);
                        }
                        let slope = (d1 - d0) / (x1 - x0);
                        // Root of d0 t + slope t²/2 = delta in a cancellation-free form.
                        let t = 2.0 * delta / (d0 + (d0 * d0 + 2.0 * slope * delta).max(0.0).sqrt());
                        return Ok((x0 + t).clamp(x0, x1));
                    }
                    acc += seg;
                }
                Ok(self.c_max())
            }
        }
    }
}

fn segment_of(knots: &[(f64, f64)], c: f64) -> usize {
    let i = knots.partition_point(|k| k.0 <= c);
    i.saturating_sub(1).min(knots.len() - 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> CostDensity {
        CostDensity::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).unwrap()
    }

    #[test]
    fn uniform_basics() {
        let f = CostDensity::uniform(2.0).unwrap();
        assert_eq!(f.cdf(1.0), 0.5);
        assert_eq!(f.quantile(0.25).unwrap(), 0.5);
        assert_eq!(f.density(3.0), 0.0);
        assert!(CostDensity::uniform(0.0).is_err());
    }

    #[test]
    fn tent_cdf_and_quantile() {
        let f = tent();
        assert!((f.cdf(1.0) - 0.5).abs() < 1e-15);
        assert!((f.cdf(2.0) - 1.0).abs() < 1e-15);
        assert!((f.cdf(0.5) - 0.125).abs() < 1e-15);
        for p in [0.0, 0.01, 0.125, 0.5, 0.7, 0.99, 1.0] {
            let c = f.quantile(p).unwrap();
            assert!((f.cdf(c) - p).abs() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(CostDensity::piecewise_linear(vec![(0.0, 1.0)]).is_err());
        assert!(CostDensity::piecewise_linear(vec![(0.0, 1.0), (0.5, 1.0)]).is_err());
        assert!(CostDensity::piecewise_linear(vec![(0.1, 1.0), (1.1, 1.0)]).is_err());
        assert!(CostDensity::piecewise_linear(vec![(0.0, -1.0), (1.0, 3.0)]).is_err());
        assert!(CostDensity::piecewise_linear(vec![(0.0, 1.0), (1.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn flat_zero_segment_is_degenerate() {
        let f = CostDensity::piecewise_linear(vec![(0.0, 1.0), (0.5, 0.0), (1.0, 0.0), (1.5, 3.0)]).unwrap();
        assert!(matches!(f.quantile(0.5), Err(Error::DegenerateDensity(_))));
    }

    #[test]
    fn serde_shape() {
        let f: CostDensity = serde_json::from_str(r#"{"kind":"uniform","c_max":1.0}"#).unwrap();
        assert_eq!(f, CostDensity::Uniform { c_max: 1.0 });
        let g: CostDensity =
            serde_json::from_str(r#"{"kind":"piecewise_linear","knots":[[0,0],[1,1],[2,0]]}"#).unwrap();
        assert_eq!(g, tent());
    }
}
