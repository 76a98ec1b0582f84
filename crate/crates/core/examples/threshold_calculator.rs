//! Threshold calculus: derived quantities, round budgets, and the asymptote.
//!
//! cargo run --example threshold_calculator

use robust_vqc::bounds::{
    alpha_from_q, lemma_min_rounds, lmko_threshold, min_rounds, single_run_parameters,
    threshold_report, ThresholdInputs,
};

fn main() -> robust_vqc::Result<()> {
    let q = 1.0 / 3.0;
    let alpha = alpha_from_q(q)?;
    let single = single_run_parameters(q)?;
    println!(
        "q = {q:.6}: alpha = {alpha}, single run (c, s) = ({:.6}, {:.6})",
        single.c, single.s
    );
    println!(
        "comparison thresholds alpha/2 = {}, alpha = {}",
        lmko_threshold(2, q)?,
        lmko_threshold(1, q)?
    );

    let r = threshold_report(ThresholdInputs::new(354_134, alpha, 0.05, 0.0)?)?;
    println!("\nN = 354134, delta = 0.05");
    println!(
        "  A = {:.4}  A' = {:.6}  f = {:.6}  g = {:.6}",
        r.a, r.a_prime, r.f, r.g
    );
    println!(
        "  w = {:.6}  noise threshold = {:.6}  feasible = {}",
        r.w,
        r.noise_threshold,
        r.feasible()
    );

    println!("\nsmallest N tolerating a given noise level (delta = 0.2):");
    for target in [0.15, 0.2, 0.2133, 0.24] {
        println!(
            "  p_noise > {target:<6} needs N = {}",
            min_rounds(alpha, 0.2, 0.0, target)?
        );
    }
    match min_rounds(alpha, 0.2, 0.0, 0.25) {
        Ok(n) => println!("  p_noise > 0.25 needs N = {n}"),
        Err(e) => println!("  p_noise > 0.25: {e}"),
    }

    println!("\nlemma round bound at A = 100, delta = 0.2:");
    for epsilon in [0.0, 0.25, 0.5] {
        println!(
            "  epsilon = {epsilon:<4} N = {}",
            lemma_min_rounds(alpha, 0.2, epsilon, 100.0)?
        );
    }

    println!("\nnoise threshold approaching alpha (delta = 0.05):");
    for exp in 5..=9 {
        let n = 10u64.pow(exp);
        let r = threshold_report(ThresholdInputs::new(n, alpha, 0.05, 0.0)?)?;
        println!(
            "  N = 1e{exp}: {:.6}  (gap to alpha {:.2e})",
            r.noise_threshold,
            alpha - r.noise_threshold
        );
    }
    Ok(())
}
