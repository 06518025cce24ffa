//! How much a single customer gains by deviating from the mean-field
//! equilibrium in a finite system.
//!
//! ```bash
//! cargo run --release --example epsilon_nash
//! ```

use supermarket::equilibrium::find_nash;
use supermarket::mean_field::{GameParams, SamplingDistribution};
use supermarket::sim::{estimate_deviation_cost, SimConfig};

fn main() -> supermarket::Result<()> {
    let params = GameParams::new(0.9, 1.0, 1.0, 4)?;
    let s = find_nash(&params)?;
    let mu = SamplingDistribution::from_real(s, params.l_max)?;
    println!("mean-field equilibrium: sample {s:.4} queues");

    for (n, horizon) in [(10, 100_000.0), (100, 10_000.0), (1000, 2_000.0)] {
        print!("N = {n:>4}:");
        for l in 1..=params.l_max {
            let cfg = SimConfig::new(n, params.lambda, mu.clone(), horizon, 7)?.with_tagged(0.01, Some(l))?;
            let d = estimate_deviation_cost(&cfg, params.c, params.c_s)?;
            print!("  L={l} {:+.4}±{:.4}", d.gain.mean, d.gain.stderr);
        }
        println!();
    }
    Ok(())
}
