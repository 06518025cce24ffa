//! Two servers, everyone joins the shorter queue. The wait exceeds both the
//! pooled M/M/2 system and the shorter of two independent M/M/1 queues,
//! which share the value `1/(1−λ²)`.
//!
//! ```bash
//! cargo run --release --example two_server_externality
//! ```

use supermarket::sim::two_server_externality;

fn main() -> supermarket::Result<()> {
    for lambda in [0.3, 0.5, 0.7, 0.9] {
        let r = two_server_externality(lambda, 2.0e6, 1000.0, 1)?;
        println!(
            "lambda = {lambda}: w_hat = {:.4} ± {:.4}, 1/(1-lambda^2) = {:.4}, z = {:.1}",
            r.w_hat.mean, r.w_hat.stderr, r.mm2_wait, r.z_score
        );
    }
    Ok(())
}
