//! Equilibrium queue-length tails of the mean-field model.
//!
//! ```bash
//! cargo run --example tail_distribution
//! ```

use supermarket::mean_field::{tail_distribution, GameParams, SamplingDistribution, DEFAULT_TOL};

fn main() -> supermarket::Result<()> {
    let lambda = 0.9;
    let strategies = [
        ("sample 1", SamplingDistribution::point(1, 3)?),
        ("sample 2", SamplingDistribution::point(2, 3)?),
        ("sample 1.5", SamplingDistribution::from_real(1.5, 3)?),
        ("mixed", SamplingDistribution::new(vec![0.2, 0.5, 0.3])?),
    ];
    let params = GameParams::new(lambda, 1.0, 0.05, 3)?;

    for (name, mu) in &strategies {
        let tail = tail_distribution(mu, lambda, DEFAULT_TOL)?;
        let head: Vec<String> = tail.r.iter().take(6).map(|r| format!("{r:.5}")).collect();
        println!(
            "{name:>10}: r = [{}, ...] ({} terms, bound {:.1e})",
            head.join(", "),
            tail.r.len(),
            tail.truncation_bound
        );
        for l in 1..=3 {
            println!(
                "{:>14} E[W({l})] = {:.4}  cost = {:.4}",
                "",
                tail.expected_wait(l),
                tail.cost(l, &params)
            );
        }
    }
    Ok(())
}
