//! The avoidance game: exact enumeration, Monte Carlo, and a size sweep.
//!
//! cargo run --example avoidance_game

use robust_vqc::experiments::decile_sizes;
use robust_vqc::game::{
    exact_win_probability, monte_carlo_win_probability, strategy_sweep, AdversaryStrategy,
    GameParams, Subset,
};

fn main() -> robust_vqc::Result<()> {
    // N = 2, S = {first round}: the prover wins iff C = {first round}
    let tiny = GameParams::new(2, 0.25, 0.2, 0.0)?;
    let p = exact_win_probability(&tiny, &Subset::from_indices(2, [0])?)?;
    println!("N = 2, S = {{1}}: exact win probability {p:.6}");

    let params = GameParams::new(12, 0.25, 0.3, 0.2)?;
    let members = vec![0, 3, 4, 7, 9];
    let exact =
        exact_win_probability(&params, &Subset::from_indices(12, members.iter().copied())?)?;
    let mc = monte_carlo_win_probability(
        &params,
        &AdversaryStrategy::FixedSet { members },
        200_000,
        1,
    )?;
    println!(
        "N = 12, |S| = 5, epsilon = 0.2: exact {exact:.6}, Monte Carlo {:.6} [{:.6}, {:.6}]",
        mc.point_estimate, mc.ci_low, mc.ci_high
    );

    let big = GameParams::new(2_000, 0.25, 0.2, 0.0)?;
    let sweep = strategy_sweep(&big, &decile_sizes(2_000), 2_000, 7)?;
    println!("\nN = 2000, alpha = 0.25, w = 0.2: win rate by |S|");
    for e in &sweep.entries {
        println!(
            "  |S| = {:>4}: {:.4} (ci_high {:.4})",
            e.size, e.summary.point_estimate, e.summary.ci_high
        );
    }
    println!(
        "best size {}, max ci_high {:.4}",
        sweep.argmax_size,
        sweep.max_ci_high()
    );
    Ok(())
}
