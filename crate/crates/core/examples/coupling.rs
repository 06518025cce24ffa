//! Two systems driven by one event stream: the one whose customers sample
//! more never holds more work above any level.
//!
//! ```bash
//! cargo run --release --example coupling
//! ```

use supermarket::mean_field::SamplingDistribution;
use supermarket::sim::{run_coupled_sim, CouplingConfig};

fn main() -> supermarket::Result<()> {
    let pairs = [
        (
            "1 vs 2",
            SamplingDistribution::point(1, 2)?,
            SamplingDistribution::point(2, 2)?,
        ),
        (
            "mixed",
            SamplingDistribution::new(vec![0.5, 0.3, 0.2])?,
            SamplingDistribution::new(vec![0.1, 0.4, 0.5])?,
        ),
    ];
    for (name, mu1, mu2) in &pairs {
        for seed in 1..=3 {
            let cfg = CouplingConfig {
                n: 100,
                lambda: 0.9,
                horizon: 1000.0,
                warmup: 100.0,
                seed,
            };
            let r = run_coupled_sim(&cfg, mu1, mu2)?;
            println!(
                "{name}, seed {seed}: violations {} in {} checks, mean queue {:.3} vs {:.3}",
                r.violations, r.order_checks, r.mean_queue_length[0], r.mean_queue_length[1]
            );
        }
    }
    Ok(())
}
