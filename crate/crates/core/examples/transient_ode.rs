//! Relaxation of the mean-field tail towards its fixed point.
//!
//! ```bash
//! cargo run --example transient_ode
//! ```

use supermarket::mean_field::{tail_distribution, transient_ode_strided, SamplingDistribution, DEFAULT_TOL};

fn main() -> supermarket::Result<()> {
    let lambda = 0.9;
    let mu = SamplingDistribution::point(2, 2)?;
    let fixed = tail_distribution(&mu, lambda, DEFAULT_TOL)?.r;

    for (name, start) in [
        ("empty", vec![1.0]),
        ("M/M/1 tail", (0..60).map(|k| lambda.powi(k)).collect()),
    ] {
        println!("start: {name}");
        let traj = transient_ode_strided(&mu, lambda, &start, 200.0, 0.01, 2000)?;
        for (t, r) in traj.times.iter().zip(&traj.states) {
            let dist = r
                .iter()
                .enumerate()
                .map(|(k, x)| (x - fixed.get(k).copied().unwrap_or(0.0)).abs())
                .fold(0.0, f64::max);
            println!(
                "  t = {t:>5.1}  r(1..4) = {:.4} {:.4} {:.4} {:.4}  max gap {dist:.2e}",
                r[1], r[2], r[3], r[4]
            );
        }
    }
    Ok(())
}
