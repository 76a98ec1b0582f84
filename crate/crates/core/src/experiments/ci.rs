//! Binomial confidence intervals and the Monte Carlo summary record.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF, Normal};

/// Confidence level used when none is given.
pub const DEFAULT_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMethod {
    /// Wilson score interval with continuity correction.
    #[default]
    WilsonCc,
    /// Exact Clopper-Pearson interval.
    ClopperPearson,
}

fn two_sided_z(level: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(1.0 - (1.0 - level) / 2.0)
}

/// Two-sided interval for a binomial proportion.
///
/// Zero successes always yields `low = 0` and `trials` successes `high = 1`.
pub fn confidence_interval(
    successes: u64,
    trials: u64,
    level: f64,
    method: IntervalMethod,
) -> (f64, f64) {
    assert!(
        trials > 0 && successes <= trials,
        "need 0 <= successes <= trials, trials > 0"
    );
    assert!(level > 0.0 && level < 1.0, "level must lie in (0, 1)");
    match method {
        IntervalMethod::WilsonCc => wilson_cc(successes, trials, level),
        IntervalMethod::ClopperPearson => clopper_pearson(successes, trials, level),
    }
}

fn wilson_cc(successes: u64, trials: u64, level: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = two_sided_z(level);
    let z2 = z * z;
    let denom = 2.0 * (n + z2);
    let low = if successes == 0 {
        0.0
    } else {
        let rad = (z2 - 2.0 - 1.0 / n + 4.0 * p * (n * (1.0 - p) + 1.0)).max(0.0);
        ((2.0 * n * p + z2 - 1.0 - z * rad.sqrt()) / denom).max(0.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        let rad = (z2 + 2.0 - 1.0 / n + 4.0 * p * (n * (1.0 - p) - 1.0)).max(0.0);
        ((2.0 * n * p + z2 + 1.0 + z * rad.sqrt()) / denom).min(1.0)
    };
    (low.min(p), high.max(p))
}

fn clopper_pearson(successes: u64, trials: u64, level: f64) -> (f64, f64) {
    let tail = (1.0 - level) / 2.0;
    let x = successes as f64;
    let n = trials as f64;
    let low = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).expect("beta").inverse_cdf(tail)
    };
    let high = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x)
            .expect("beta")
            .inverse_cdf(1.0 - tail)
    };
    (low, high)
}

/// Outcome of a batch of independent Bernoulli trials.
///
/// `wall_time_secs` is not serialized so that output files depend only on
/// the configuration and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub successes: u64,
    pub trials: u64,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl TrialSummary {
    pub fn new(successes: u64, trials: u64, seed: u64) -> Self {
        Self::with_level(
            successes,
            trials,
            seed,
            DEFAULT_LEVEL,
            IntervalMethod::WilsonCc,
        )
    }

    pub fn with_level(
        successes: u64,
        trials: u64,
        seed: u64,
        level: f64,
        method: IntervalMethod,
    ) -> Self {
        let (ci_low, ci_high) = confidence_interval(successes, trials, level, method);
        Self {
            successes,
            trials,
            point_estimate: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            level,
            seed,
            wall_time_secs: 0.0,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub(crate) fn timed(mut self, start: std::time::Instant) -> Self {
        self.wall_time_secs = start.elapsed().as_secs_f64();
        self
    }
}
