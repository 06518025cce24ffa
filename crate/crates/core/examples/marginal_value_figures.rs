//! Marginal value of one more sample, `V(l, μ) = E[W(l)] − E[W(l+1)]`.
//!
//! Prints three views: `V(5, L)` against a population sampling `L` queues,
//! `V(L, L+q)` across each unit interval, and `ln V(1, 1+q)`.
//!
//! ```bash
//! cargo run --example marginal_value_figures
//! ```

use supermarket::equilibrium::check_local_monotonicity;
use supermarket::mean_field::{marginal_value, SamplingDistribution, DEFAULT_TOL};

fn v(l: usize, s: f64, lambda: f64, l_max: usize) -> supermarket::Result<f64> {
    let mu = SamplingDistribution::from_real(s, l_max)?;
    Ok(marginal_value(l, &mu, lambda, DEFAULT_TOL)?
        .finite()
        .unwrap_or(f64::INFINITY))
}

fn main() -> supermarket::Result<()> {
    println!("V(5, L) at lambda = 0.99");
    for l in 1..=20 {
        println!("  L = {l:>2}  {:.6}", v(5, l as f64, 0.99, 20)?);
    }

    println!("\nV(L, L+q) at lambda = 0.99, q = 0, 0.25, ..., 1");
    for l in 1..=9 {
        let row: Vec<String> = (0..=4)
            .map(|i| v(l, l as f64 + i as f64 / 4.0, 0.99, 10).map(|x| format!("{x:.6}")))
            .collect::<Result<_, _>>()?;
        println!("  L = {l}  {}", row.join("  "));
    }
    for m in check_local_monotonicity(0.99, 10, 1000)? {
        println!("  L = {}: {:?} (largest rise {:.1e})", m.l, m.verdict, m.max_rise);
    }

    println!("\nln V(1, 1+q)");
    for lambda in [0.5, 0.9, 0.99] {
        let row: Vec<String> = (0..=4)
            .map(|i| v(1, 1.0 + i as f64 / 4.0, lambda, 2).map(|x| format!("{:.4}", x.ln())))
            .collect::<Result<_, _>>()?;
        println!("  lambda = {lambda}: {}", row.join("  "));
    }
    Ok(())
}
