use std::fmt::Write as _;
use std::path::Path;

use super::SimResult;
use crate::error::{invalid, Result};

/// Empirical tail as CSV with columns `k,r_hat,stderr`.
pub fn tail_csv(result: &SimResult) -> String {
    let mut out = String::from("k,r_hat,stderr\n");
    for (k, e) in result.empirical_tail.iter().enumerate() {
        writeln!(out, "{k},{},{}", e.mean, e.stderr).expect("writing to a String");
    }
    out
}

pub fn write_tail_csv(result: &SimResult, path: &Path) -> Result<()> {
    std::fs::write(path, tail_csv(result)).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean_field::SamplingDistribution;
    use crate::sim::{run_equilibrium_sim, SimConfig};

    #[test]
    fn csv_shape() {
        let cfg = SimConfig::new(10, 0.5, SamplingDistribution::point(1, 1).unwrap(), 300.0, 1).unwrap();
        let r = run_equilibrium_sim(&cfg).unwrap();
        let csv = tail_csv(&r);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,r_hat,stderr"));
        assert_eq!(lines.next(), Some("0,1,0"));
        assert_eq!(csv.lines().count(), r.empirical_tail.len() + 1);
    }
}
