//! Concentration bounds next to the exact tails they dominate.
//!
//! cargo run --example tail_bounds

use robust_vqc::bounds::{
    exact_binomial_cdf, exact_hypergeom_cdf, hoeffding_lower_tail, hypergeom_tail_low,
};
use robust_vqc::experiments::{tail_bound_validation, TailGrid};

fn main() -> robust_vqc::Result<()> {
    println!("Binomial(100, 1/2), lower tail:");
    for k in [30, 35, 40, 45, 50] {
        let exact = exact_binomial_cdf(100, 0.5, k)?;
        let bound = hoeffding_lower_tail(100, 0.5, k as f64)?;
        println!("  Pr[X <= {k}] = {exact:.3e} <= {bound:.3e}");
    }
    println!("Hypergeometric(20, 10, 10), lower tail:");
    for lambda in 1..5 {
        let exact = exact_hypergeom_cdf(20, 10, 10, lambda)?;
        let bound = hypergeom_tail_low(20, 10, 10, lambda as f64)?;
        println!("  Pr[X <= {lambda}] = {exact:.3e} <= {bound:.3e}");
    }

    let report = tail_bound_validation(&TailGrid::default())?;
    println!(
        "\ndefault grid: {} points, {} violations",
        report.points(),
        report.violations()
    );
    for f in &report.families {
        println!(
            "  {:<22} {:>6} points, max exact/bound {:.4}",
            f.family, f.points, f.max_ratio
        );
    }
    Ok(())
}
