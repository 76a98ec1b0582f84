//! Monte Carlo experiments with confidence intervals and file outputs.
//!
//! Every experiment reports rows of the same shape ([`Row`]); a row passes
//! when the upper confidence limit of its rate is at most `delta`. Trial `i`
//! of a row always draws from the same counter-keyed stream, so results are
//! identical for any worker count.

mod ci;
mod config;
mod curve;
mod runs;
mod tails;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{StreamKey, TrialRng};

pub use ci::{confidence_interval, IntervalMethod, TrialSummary, DEFAULT_LEVEL};
pub use config::{
    apply_override, load_config, parse_config, run_config, write_outputs, AdversarySpec, CurveSpec,
    ExperimentConfig, ExperimentReport, ExperimentSpec, InstanceChoice, LemmaPointSpec, LemmaSpec,
    PointSpec, TailSpec, DEFAULT_TRIALS,
};
pub use curve::{curve_svg, log_grid, threshold_curve, CurveRow};
pub use runs::{
    adversary_experiment, decile_sizes, honest_abort_experiment, lemma_validation, AdversaryReport,
    HonestAbortReport, LemmaPoint, LemmaReport, LemmaRow,
};
pub use tails::{tail_bound_validation, TailFamilyResult, TailGrid, TailReport};

/// One line of the CSV output.
///
/// Columns that do not apply to an experiment are left empty; `pass` is
/// empty for informational rows that do not enter the overall verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub n_rounds: Option<u64>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub w: Option<f64>,
    pub p_noise: Option<f64>,
    pub strategy: String,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub pass: Option<bool>,
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(invalid("workers", "must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| invalid("workers", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Number of trials `i < trials` for which `success(rng_i)` holds.
pub(crate) fn count_successes<F>(trials: u64, key: StreamKey, success: F) -> u64
where
    F: Fn(&mut TrialRng) -> bool + Sync,
{
    (0..trials)
        .into_par_iter()
        .filter(|&i| success(&mut key.trial(i)))
        .count() as u64
}

/// `q` with `alpha = (1 - 2q) / (2 - 2q)`.
pub fn q_from_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(invalid(
            "alpha",
            format!("must lie in (0, 1/2], got {alpha}"),
        ));
    }
    Ok((1.0 - 2.0 * alpha) / (2.0 - 2.0 * alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_alpha_inverse() {
        assert!((q_from_alpha(0.25).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for q in [0.0, 0.1, 0.3, 0.45] {
            let a = crate::bounds::alpha_from_q(q).unwrap();
            assert!((q_from_alpha(a).unwrap() - q).abs() < 1e-12);
        }
        assert!(q_from_alpha(0.0).is_err());
    }

    #[test]
    fn counts_do_not_depend_on_pool() {
        use rand::Rng;
        let key = StreamKey::new(11, 3);
        let run =
            |w| with_workers(w, || count_successes(5000, key, |r| r.random_bool(0.3))).unwrap();
        let base = run(None);
        assert_eq!(run(Some(1)), base);
        assert_eq!(run(Some(3)), base);
        assert!(with_workers(Some(0), || ()).is_err());
    }
}
