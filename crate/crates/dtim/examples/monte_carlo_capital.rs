//! Check the Monte Carlo capital estimator against exact enumeration.
//!
//! On graphs this small every live-edge world can be enumerated, so the
//! exact expected capital is available as a reference. The simulation is
//! deterministic for a fixed rng seed regardless of thread count.
//!
//! Run with: cargo run --release --example monte_carlo_capital

use dtim::fixture;
use dtim::{estimate_capital, exact_capital};

fn main() -> dtim::Result<()> {
    let dg = fixture::example_two();
    let ts = fixture::example_two_targets(&dg)?;
    let seeds = [fixture::B];

    let exact = exact_capital(&dg, &seeds, &ts)?;
    println!("exact expected capital: {exact:.6}");

    for runs in [100, 1_000, 10_000, 100_000] {
        let report = estimate_capital(&dg, &seeds, &ts, runs, 7)?;
        println!(
            "runs {:>7}: estimate {:.6} +- {:.6}  (error {:+.6})",
            runs,
            report.capital_estimate,
            report.capital_std_error,
            report.capital_estimate - exact
        );
    }

    // activation frequencies for the interesting nodes
    let report = estimate_capital(&dg, &seeds, &ts, 100_000, 7)?;
    let names = ["t", "e", "c", "g", "b", "h", "d", "f", "a", "u1", "u2"];
    println!("activation probability:");
    for (v, name) in names.iter().enumerate() {
        let p = report.activation_probability[v];
        if p > 0.0 {
            println!("  {name:<3} {p:.4}");
        }
    }
    Ok(())
}
