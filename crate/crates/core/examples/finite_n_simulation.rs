//! Finite systems against the mean-field tail, with batch-means errors.
//!
//! ```bash
//! cargo run --release --example finite_n_simulation
//! ```

use supermarket::mean_field::{tail_distribution, SamplingDistribution, DEFAULT_TOL};
use supermarket::sim::{run_equilibrium_sim, tail_csv, SimConfig};

fn main() -> supermarket::Result<()> {
    let lambda = 0.9;
    let mu = SamplingDistribution::point(2, 2)?;
    let reference = tail_distribution(&mu, lambda, DEFAULT_TOL)?.r;

    for (n, horizon) in [(10, 50_000.0), (100, 5_000.0), (1000, 1_500.0)] {
        let r = run_equilibrium_sim(&SimConfig::new(n, lambda, mu.clone(), horizon, 1)?)?;
        let gap = r.max_tail_gap(&reference);
        println!(
            "N = {n:>4}: mean wait {:.4} ± {:.4}, max tail gap {:.4} ± {:.4}, {} events",
            r.mean_wait_all.mean, r.mean_wait_all.stderr, gap.mean, gap.stderr, r.event_count
        );
        if n == 1000 {
            print!("{}", tail_csv(&r).lines().take(6).collect::<Vec<_>>().join("\n"));
            println!("\n(mean field: {:?})", &reference[..5]);
        }
    }
    Ok(())
}
