//! Customers with different waiting costs: threshold strategies and their
//! fixed point.
//!
//! ```bash
//! cargo run --example heterogeneous_costs
//! ```

use supermarket::hetero::{hetero_nash, mu_from_thresholds, CostDensity, HeteroNashOptions, ThresholdStrategy};

fn main() -> supermarket::Result<()> {
    let densities = [
        ("uniform on [0, 1]", CostDensity::uniform(1.0)?),
        (
            "rising on [0, 1]",
            CostDensity::piecewise_linear(vec![(0.0, 0.5), (1.0, 1.5)])?,
        ),
        (
            "tent on [0, 2]",
            CostDensity::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)])?,
        ),
    ];
    for (name, f) in &densities {
        let report = hetero_nash(0.8, 0.05, 4, f, &HeteroNashOptions::default())?;
        let mass: Vec<String> = report.mu.masses().iter().map(|m| format!("{m:.4}")).collect();
        let cuts: Vec<String> = report.strategy.thresholds.iter().map(|c| format!("{c:.4}")).collect();
        println!("{name}: {:?} after {} steps", report.status, report.iterations);
        println!("  thresholds [{}]", cuts.join(", "));
        println!("  samples    [{}]", mass.join(", "));
    }

    // A strategy is a list of cost cut-offs; the induced sampling law
    // follows from the density.
    let f = CostDensity::uniform(1.0)?;
    let s = ThresholdStrategy::new(vec![0.0, 0.25, 0.5, 1.0])?;
    println!(
        "\nthresholds {:?} induce {:?}",
        s.thresholds,
        mu_from_thresholds(&s, &f)?.masses()
    );
    Ok(())
}
