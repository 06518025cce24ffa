//! Equilibrium against social optimum: customers never sample more than a
//! planner would have them.
//!
//! ```bash
//! cargo run --example social_optimum
//! ```

use supermarket::equilibrium::{enumerate_nash, social_objective, social_optimum};
use supermarket::mean_field::GameParams;

fn main() -> supermarket::Result<()> {
    let (lambda, l_max) = (0.95, 6);
    println!(
        "{:>8} {:>10} {:>10} {:>12} {:>12}",
        "c_s/c", "NE", "optimum", "cost at NE", "optimal cost"
    );
    for ratio in [0.001, 0.01, 0.05, 0.1, 0.3, 1.0] {
        let params = GameParams::with_ratio(lambda, ratio, l_max)?;
        let opt = social_optimum(&params, 1e-10)?;
        let ne = enumerate_nash(&params, 200)?;
        let top = ne.equilibria.last().map(|e| e.value).unwrap_or(f64::NAN);
        println!(
            "{ratio:>8} {top:>10.4} {:>10.4} {:>12.5} {:>12.5}",
            opt.value,
            social_objective(top, &params)?,
            opt.cost
        );
    }
    Ok(())
}
