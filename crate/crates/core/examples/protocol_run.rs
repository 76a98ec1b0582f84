//! Single protocol runs: honest, benign-noise, and attacked.
//!
//! cargo run --example protocol_run

use robust_vqc::bounds::{threshold_report, ThresholdInputs};
use robust_vqc::game::AdversaryStrategy;
use robust_vqc::protocol::{min_corrupted_for_flip, run_protocol, AttackPlan, ProtocolParams};
use robust_vqc::rng::StreamKey;

fn main() -> robust_vqc::Result<()> {
    let q = 1.0 / 3.0;
    let report = threshold_report(ThresholdInputs::new(221_049, 0.25, 0.2, 0.0)?)?;
    let p_noise = 0.8 * report.noise_threshold;
    println!("N = 221049, w = {:.5}, p_noise = {p_noise:.5}", report.w);

    let yes = ProtocolParams::new(221_049, report.w, p_noise, 1.0 - q, q)?;
    let key = StreamKey::new(42, 0);
    let honest = run_protocol(&yes, None, &mut key.trial(0))?;
    println!("\nhonest prover, YES instance:");
    for (k, v) in honest.key_values() {
        println!("  {k:<10} {v}");
    }

    let m = min_corrupted_for_flip(honest.sc, q)?;
    println!(
        "\nflipping the majority needs {m} corrupted computation rounds out of {}",
        honest.sc
    );

    for size in [1_000, 50_000, 221_049] {
        let mut rng = key.trial(size as u64);
        let s = AdversaryStrategy::UniformRandomOfSize { size }.sample(yes.n, &mut rng);
        let counts = run_protocol(&yes, Some(&AttackPlan::from_subset(&s)), &mut rng)?;
        println!(
            "non-benign attack on {size:>6} rounds: verdict {:<6} (failed X {}/{}, failed Z {}/{})",
            counts.verdict.to_string(),
            counts.failed_x,
            counts.sx,
            counts.failed_z,
            counts.sz
        );
    }
    Ok(())
}
