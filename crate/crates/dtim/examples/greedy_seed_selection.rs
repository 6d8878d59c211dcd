//! Greedy seed selection on the built-in 19-node walkthrough fixture.
//!
//! The fixture has a single high-value target t, two amplifier accounts u1
//! and u2 feeding it through separate audiences, and a handful of direct
//! followers. The two diversity variants disagree on purpose: the local
//! variant keeps the cascade inside a tight neighbourhood and picks b, the
//! global variant rewards reach into unexplored regions and picks u1.
//! With alpha = 1 (capital only) the pick changes again, to a.
//!
//! Run with: cargo run --example greedy_seed_selection

use dtim::fixture;
use dtim::{dtim_select, SelectionConfig, Variant};

fn main() -> dtim::Result<()> {
    let dg = fixture::example_two();
    let ts = fixture::example_two_targets(&dg)?;
    let names = ["t", "e", "c", "g", "b", "h", "d", "f", "a", "u1", "u2"];

    for (label, variant, alpha) in [
        ("local,  alpha 0.5", Variant::Local, 0.5),
        ("global, alpha 0.5", Variant::Global, 0.5),
        ("local,  alpha 1.0", Variant::Local, 1.0),
    ] {
        let cfg = SelectionConfig {
            k: 1,
            alpha,
            eta: 1e-4,
            variant,
        };
        let result = dtim_select(&dg, &ts, &cfg)?;
        let seed = &result.seeds[0];
        println!(
            "{label}: seed {:<3} objective {:.6} (capital {:.6}, diversity {:.6})",
            names[seed.node as usize], seed.objective, seed.capital, seed.diversity
        );
    }
    Ok(())
}
