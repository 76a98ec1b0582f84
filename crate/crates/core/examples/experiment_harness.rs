//! Runs an experiment config and writes CSV, JSON, and (for curves) SVG.
//!
//! cargo run --example experiment_harness -- [config.json] [out-dir] [key=value ...]
//!
//! Defaults to the threshold curve, which finishes instantly. The configs
//! for the honest-abort, adversary, and lemma experiments run at full size
//! and take tens of seconds each; add `trials=100` to shorten them.

use std::path::PathBuf;

use robust_vqc::experiments::{load_config, run_config, write_outputs};

fn main() -> robust_vqc::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/threshold_curve.json")
    });
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("robust-vqc"));
    let overrides: Vec<String> = args.collect();

    let report = run_config(&load_config(&config, &overrides)?)?;
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for row in &report.rows {
        println!(
            "{:<5} {:<20} N={:<10} estimate {:.6}",
            match row.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "info",
            },
            row.strategy,
            row.n_rounds.map(|n| n.to_string()).unwrap_or_default(),
            row.estimate
        );
    }
    for path in write_outputs(&report, &out)? {
        println!("wrote {}", path.display());
    }
    println!("overall: {}", if report.passed { "PASS" } else { "FAIL" });
    Ok(())
}
