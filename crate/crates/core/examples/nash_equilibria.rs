//! Symmetric Nash equilibria: one by construction, or all of them.
//!
//! ```bash
//! cargo run --example nash_equilibria
//! ```

use supermarket::equilibrium::{enumerate_nash, find_nash, DEFAULT_Q_GRID};
use supermarket::mean_field::GameParams;

fn main() -> supermarket::Result<()> {
    for (lambda, ratio, l_max) in [(0.5, 0.05, 5), (0.6, 0.05, 4), (0.9, 1.0, 4), (0.999, 0.0148, 25)] {
        let params = GameParams::with_ratio(lambda, ratio, l_max)?;
        let one = find_nash(&params)?;
        let report = enumerate_nash(&params, DEFAULT_Q_GRID)?;
        println!("lambda = {lambda}, c_s/c = {ratio}, l_max = {l_max}");
        println!("  constructed: {one:.6}");
        for eq in &report.equilibria {
            println!("  {:?} {:.6}", eq.kind, eq.value);
        }
        println!("  unique by monotonicity: {}", report.unique_guaranteed);
        for w in &report.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
