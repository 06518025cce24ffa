use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Scalar parameters of the homogeneous game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Arrival rate per server.
    pub lambda: f64,
    /// Cost per unit of waiting time.
    pub c: f64,
    /// Cost per sampled queue.
    pub c_s: f64,
    /// Largest admissible sample count.
    pub l_max: usize,
}

impl GameParams {
    pub fn new(lambda: f64, c: f64, c_s: f64, l_max: usize) -> Result<Self> {
        let params = Self { lambda, c, c_s, l_max };
        params.validate()?;
        Ok(params)
    }

    /// Parameters with `c = 1`, so `c_s` is the cost ratio.
    pub fn with_ratio(lambda: f64, cost_ratio: f64, l_max: usize) -> Result<Self> {
        Self::new(lambda, 1.0, cost_ratio, l_max)
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(invalid(format!("waiting cost c must be > 0, got {}", self.c)));
        }
        if !(self.c_s >= 0.0 && self.c_s.is_finite()) {
            return Err(invalid(format!("sampling cost c_s must be >= 0, got {}", self.c_s)));
        }
        if self.l_max < 1 {
            return Err(invalid("l_max must be at least 1"));
        }
        Ok(())
    }

    /// `c_s / c`, the threshold the marginal value of sampling is compared to.
    pub fn cost_ratio(&self) -> f64 {
        self.c_s / self.c
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(crate::Error::Domain {
            name: "lambda",
            value: lambda,
            domain: "(0, 1)",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unstable_and_degenerate_inputs() {
        assert!(GameParams::new(1.0, 1.0, 0.1, 3).is_err());
        assert!(GameParams::new(0.0, 1.0, 0.1, 3).is_err());
        assert!(GameParams::new(0.5, 0.0, 0.1, 3).is_err());
        assert!(GameParams::new(0.5, 1.0, -0.1, 3).is_err());
        assert!(GameParams::new(0.5, 1.0, 0.1, 0).is_err());
        assert!(GameParams::new(0.5, 1.0, f64::NAN, 3).is_err());
        let p = GameParams::new(0.5, 2.0, 0.1, 3).unwrap();
        assert_eq!(p.cost_ratio(), 0.05);
    }
}
