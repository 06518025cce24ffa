//! The game with at most two samples, where everything is explicit.
//!
//! ```bash
//! cargo run --example two_choice
//! ```

use supermarket::equilibrium::{find_nash, two_choice_best_response, two_choice_marginal_value};
use supermarket::mean_field::GameParams;

fn main() -> supermarket::Result<()> {
    let lambda = 0.9;
    println!("V(1, 1+q) at lambda = {lambda}");
    for i in 0..=10 {
        let q = i as f64 / 10.0;
        println!("  q = {q:.1}  {:.6}", two_choice_marginal_value(q, lambda)?);
    }

    let ratio = two_choice_marginal_value(0.5, lambda)?;
    let params = GameParams::with_ratio(lambda, ratio, 2)?;
    println!("\nc_s/c = V(1, 1.5) = {ratio:.6}");
    for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("  best response to 1+{q}: {:?}", two_choice_best_response(q, &params)?);
    }
    println!("  equilibrium: {:.6}", find_nash(&params)?);
    Ok(())
}
