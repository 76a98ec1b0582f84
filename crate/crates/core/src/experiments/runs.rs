//! Protocol- and game-level Monte Carlo experiments.

use serde::{Deserialize, Serialize};

use super::{count_successes, Row, TrialSummary};
use crate::bounds::{
    compute_a, compute_a_prime, threshold_report, ThresholdInputs, ThresholdReport, MIN_A,
};
use crate::error::{invalid, Error, Result};
use crate::game::{
    exact_win_probability, monte_carlo_keyed, AdversaryStrategy, GameParams, Subset, SweepEntry,
    ENUMERATION_LIMIT,
};
use crate::protocol::{run_protocol, AttackPlan, InstanceLabel, ProtocolParams, Verdict};
use crate::rng::StreamKey;

const HONEST_STREAM: u64 = 0x686f_6e65;
const ADVERSARY_STREAM: u64 = 0x6164_7673;
const LEMMA_STREAM: u64 = 0x6c65_6d6d;

/// `{0, N/10, 2N/10, ..., N}` rounded to the nearest integer.
pub fn decile_sizes(n: usize) -> Vec<usize> {
    (0..=10).map(|j| (j * n + 5) / 10).collect()
}

pub(crate) fn regime_warnings(report: &ThresholdReport, p_noise: f64) -> Vec<String> {
    let mut warnings = Vec::new();
    if !report.feasible_a {
        warnings.push(format!("A = {} is below {MIN_A}", report.a));
    }
    if !report.feasible_f {
        warnings.push(format!("f = {} is below 0.9", report.f));
    }
    if !(p_noise < report.noise_threshold) {
        warnings.push(format!(
            "p_noise = {p_noise} is not below the noise threshold {}",
            report.noise_threshold
        ));
    }
    warnings
}

fn protocol_params(
    report: &ThresholdReport,
    q: f64,
    p_noise: f64,
    p_zero: f64,
) -> Result<ProtocolParams> {
    let n = usize::try_from(report.inputs.n).map_err(|_| invalid("N", "does not fit in memory"))?;
    if !(report.w > 0.0) {
        return Err(Error::Infeasible(format!(
            "w = {} is not positive at N = {n}",
            report.w
        )));
    }
    ProtocolParams::new(n, report.w.min(1.0), p_noise, p_zero, q)
}

/// Abort rate of the honest prover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HonestAbortReport {
    pub report: ThresholdReport,
    pub q: f64,
    pub p_noise: f64,
    /// Empty iff the point satisfies every precondition of the claim.
    pub warnings: Vec<String>,
    pub summary: TrialSummary,
}

impl HonestAbortReport {
    pub fn in_regime(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.summary.ci_high <= self.report.inputs.delta
    }

    pub fn row(&self) -> Row {
        let i = &self.report.inputs;
        Row {
            experiment: "honest-abort".into(),
            n_rounds: Some(i.n),
            alpha: Some(i.alpha),
            delta: Some(i.delta),
            epsilon: Some(i.epsilon),
            w: Some(self.report.w),
            p_noise: Some(self.p_noise),
            strategy: "honest".into(),
            trials: self.summary.trials,
            successes: self.summary.successes,
            estimate: self.summary.point_estimate,
            ci_low: Some(self.summary.ci_low),
            ci_high: Some(self.summary.ci_high),
            pass: Some(self.passed()),
        }
    }
}

/// Honest runs at `w` from the threshold report; a trial succeeds when the
/// verifier aborts. Out-of-regime points still run and carry warnings.
pub fn honest_abort_experiment(
    inputs: ThresholdInputs,
    q: f64,
    p_noise: f64,
    trials: u64,
    seed: u64,
) -> Result<HonestAbortReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let report = threshold_report(inputs)?;
    let params = protocol_params(&report, q, p_noise, 1.0 - q)?;
    let start = std::time::Instant::now();
    let key = StreamKey::new(seed, HONEST_STREAM);
    let aborts = count_successes(trials, key, |rng| {
        run_protocol(&params, None, rng)
            .expect("validated")
            .verdict
            .is_abort()
    });
    Ok(HonestAbortReport {
        report,
        q,
        p_noise,
        warnings: regime_warnings(&report, p_noise),
        summary: TrialSummary::new(aborts, trials, seed).timed(start),
    })
}

/// Adversary success rates over a sweep of attack sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryReport {
    pub report: ThresholdReport,
    pub q: f64,
    pub p_noise: f64,
    pub p_zero: f64,
    pub label: InstanceLabel,
    pub warnings: Vec<String>,
    pub entries: Vec<SweepEntry>,
}

impl AdversaryReport {
    pub fn in_regime(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn max_ci_high(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.summary.ci_high)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_ci_high() <= self.report.inputs.delta
    }

    pub fn rows(&self) -> Vec<Row> {
        let i = &self.report.inputs;
        self.entries
            .iter()
            .map(|e| Row {
                experiment: "adversary-success".into(),
                n_rounds: Some(i.n),
                alpha: Some(i.alpha),
                delta: Some(i.delta),
                epsilon: Some(i.epsilon),
                w: Some(self.report.w),
                p_noise: Some(self.p_noise),
                strategy: format!("uniform:{}", e.size),
                trials: e.summary.trials,
                successes: e.summary.successes,
                estimate: e.summary.point_estimate,
                ci_low: Some(e.summary.ci_low),
                ci_high: Some(e.summary.ci_high),
                pass: Some(e.summary.ci_high <= i.delta),
            })
            .collect()
    }
}

/// Non-benign attacks on a uniformly random set of `m` rounds for each `m`
/// in `sizes`; all other rounds behave honestly with noise `p_noise`.
///
/// A trial succeeds when the verifier does not abort and its verdict
/// contradicts the instance label. Each size has its own stream keyed by
/// the size.
#[allow(clippy::too_many_arguments)]
pub fn adversary_experiment(
    inputs: ThresholdInputs,
    q: f64,
    p_noise: f64,
    p_zero: f64,
    sizes: &[usize],
    trials: u64,
    seed: u64,
) -> Result<AdversaryReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let report = threshold_report(inputs)?;
    let params = protocol_params(&report, q, p_noise, p_zero)?;
    let label = params.instance_label();
    let wrong =
        match label {
            InstanceLabel::Yes => Verdict::Reject,
            InstanceLabel::No => Verdict::Accept,
            InstanceLabel::Unpromised => return Err(invalid(
                "p_zero",
                format!(
                    "{p_zero} violates the promise at q = {q}; the instance has no correct verdict"
                ),
            )),
        };
    let root = StreamKey::new(seed, ADVERSARY_STREAM);
    let mut entries = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let strategy = AdversaryStrategy::UniformRandomOfSize { size };
        strategy.validate(params.n)?;
        let start = std::time::Instant::now();
        let wins = count_successes(trials, root.child(size as u64), |rng| {
            let plan = AttackPlan::from_subset(&strategy.sample(params.n, rng));
            run_protocol(&params, Some(&plan), rng)
                .expect("validated")
                .verdict
                == wrong
        });
        entries.push(SweepEntry {
            size,
            summary: TrialSummary::new(wins, trials, seed).timed(start),
        });
    }
    Ok(AdversaryReport {
        report,
        q,
        p_noise,
        p_zero,
        label,
        warnings: regime_warnings(&report, p_noise),
        entries,
    })
}

/// A game parameter point together with the lemma's preconditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaPoint {
    pub params: GameParams,
    pub delta: f64,
    /// `A` with the `(1 - epsilon)^2` factor absorbed.
    pub a: f64,
    /// Largest `w` the lemma admits, `(1 - A^{-1/2}) A' (1 - epsilon) alpha`;
    /// absent when `A < 100`.
    pub w_max: Option<f64>,
}

impl LemmaPoint {
    /// `w = None` takes the largest admissible `w`.
    pub fn new(n: usize, alpha: f64, delta: f64, epsilon: f64, w: Option<f64>) -> Result<Self> {
        ThresholdInputs::new(n as u64, alpha, delta, epsilon)?;
        let detect = 1.0 - epsilon;
        let a = compute_a(n as u64, alpha * detect, delta)?;
        let w_max = (a >= MIN_A)
            .then(|| compute_a_prime(a).map(|ap| (1.0 - a.sqrt().recip()) * ap * detect * alpha))
            .transpose()?;
        let w = match (w, w_max) {
            (Some(w), _) => w,
            (None, Some(w)) => w,
            (None, None) => {
                return Err(Error::Infeasible(format!(
                    "A = {a} is below {MIN_A}; give w explicitly to run outside the lemma regime"
                )))
            }
        };
        Ok(Self {
            params: GameParams::new(n, alpha, w, epsilon)?,
            delta,
            a,
            w_max,
        })
    }

    /// Whether both lemma preconditions hold.
    pub fn in_regime(&self) -> bool {
        self.w_max
            .is_some_and(|m| self.params.w <= m * (1.0 + 1e-12))
    }
}

/// One strategy at one point, estimated or enumerated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub point: usize,
    pub params: GameParams,
    pub delta: f64,
    pub strategy: String,
    pub summary: Option<TrialSummary>,
    pub exact: Option<f64>,
    /// Small-`N` oracle rows outside the lemma regime; informational only.
    pub extrapolation: bool,
}

impl LemmaRow {
    pub fn pass(&self) -> Option<bool> {
        if self.extrapolation {
            return None;
        }
        self.summary.as_ref().map(|s| s.ci_high <= self.delta)
    }

    pub fn row(&self) -> Row {
        let (trials, successes, estimate, ci_low, ci_high) = match (&self.summary, self.exact) {
            (Some(s), _) => (
                s.trials,
                s.successes,
                s.point_estimate,
                Some(s.ci_low),
                Some(s.ci_high),
            ),
            (None, Some(p)) => (0, 0, p, None, None),
            (None, None) => (0, 0, f64::NAN, None, None),
        };
        Row {
            experiment: "lemma-validation".into(),
            n_rounds: Some(self.params.n as u64),
            alpha: Some(self.params.alpha),
            delta: Some(self.delta),
            epsilon: Some(self.params.epsilon),
            w: Some(self.params.w),
            p_noise: None,
            strategy: if self.extrapolation {
                format!("exact:{}", self.strategy)
            } else {
                self.strategy.clone()
            },
            trials,
            successes,
            estimate,
            ci_low,
            ci_high,
            pass: self.pass(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub points: Vec<LemmaPoint>,
    pub rows: Vec<LemmaRow>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass() != Some(false))
    }

    pub fn max_ci_high(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| !r.extrapolation)
            .filter_map(|r| r.summary.as_ref().map(|s| s.ci_high))
            .fold(0.0, f64::max)
    }
}

/// Monte Carlo win probabilities at every point for every strategy, plus
/// exact enumeration at each size in `exact_n` with the point's `alpha`,
/// `w`, and `epsilon`.
///
/// `strategies = None` sweeps uniform subsets at the deciles of each `N`.
/// Row `(j, k)` draws from the stream keyed by point `j` and strategy `k`.
pub fn lemma_validation(
    points: &[LemmaPoint],
    strategies: Option<&[AdversaryStrategy]>,
    exact_n: &[usize],
    trials: u64,
    seed: u64,
    allow_out_of_regime: bool,
) -> Result<LemmaReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if let Some(p) = points.iter().find(|p| !p.in_regime()) {
        if !allow_out_of_regime {
            return Err(Error::Precondition(format!(
                "lemma preconditions fail at N = {}, w = {} (A = {}, largest admissible w = {:?})",
                p.params.n, p.params.w, p.a, p.w_max
            )));
        }
    }
    if let Some(&n) = exact_n.iter().find(|&&n| n > ENUMERATION_LIMIT) {
        return Err(Error::EnumerationGuard {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let root = StreamKey::new(seed, LEMMA_STREAM);
    let mut rows = Vec::new();
    for (j, point) in points.iter().enumerate() {
        let sweep: Vec<AdversaryStrategy> = match strategies {
            Some(s) => s.to_vec(),
            None => uniform_sweep(point.params.n),
        };
        for (k, strategy) in sweep.iter().enumerate() {
            let key = root.child(j as u64).child(k as u64);
            let summary = monte_carlo_keyed(&point.params, strategy, trials, key, seed)?;
            rows.push(LemmaRow {
                point: j,
                params: point.params,
                delta: point.delta,
                strategy: strategy.label(),
                summary: Some(summary),
                exact: None,
                extrapolation: !point.in_regime(),
            });
        }
        for &n in exact_n {
            let params =
                GameParams::new(n, point.params.alpha, point.params.w, point.params.epsilon)?;
            // a uniform subset of size m wins as often as any fixed one
            for size in decile_sizes(n)
                .into_iter()
                .collect::<std::collections::BTreeSet<_>>()
            {
                let s = Subset::from_indices(n, 0..size)?;
                rows.push(LemmaRow {
                    point: j,
                    params,
                    delta: point.delta,
                    strategy: format!("uniform:{size}"),
                    summary: None,
                    exact: Some(exact_win_probability(&params, &s)?),
                    extrapolation: true,
                });
            }
        }
    }
    Ok(LemmaReport {
        points: points.to_vec(),
        rows,
    })
}

fn uniform_sweep(n: usize) -> Vec<AdversaryStrategy> {
    decile_sizes(n)
        .into_iter()
        .map(|size| AdversaryStrategy::UniformRandomOfSize { size })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(n: u64) -> ThresholdInputs {
        ThresholdInputs::new(n, 0.25, 0.2, 0.0).unwrap()
    }

    #[test]
    fn deciles() {
        assert_eq!(decile_sizes(10), (0..=10).collect::<Vec<_>>());
        let d = decile_sizes(220_053);
        assert_eq!((d[0], d[1], d[10]), (0, 22_005, 220_053));
    }

    #[test]
    fn noiseless_honest_runs_only_abort_on_degenerate_partitions() {
        let r = honest_abort_experiment(inputs(3000), 1.0 / 3.0, 0.0, 200, 1).unwrap();
        assert_eq!(r.summary.successes, 0);
        assert!(!r.in_regime());
        // A < 1 makes f, and with it w, negative
        assert!(honest_abort_experiment(inputs(3), 1.0 / 3.0, 0.0, 10, 2).is_err());
    }

    #[test]
    fn certain_noise_always_aborts() {
        let r = honest_abort_experiment(inputs(3000), 1.0 / 3.0, 1.0, 100, 1).unwrap();
        assert_eq!(r.summary.successes, 100);
        assert!(!r.passed());
    }

    #[test]
    fn full_attack_never_succeeds() {
        let r = adversary_experiment(inputs(3000), 1.0 / 3.0, 0.0, 2.0 / 3.0, &[0, 3000], 100, 1)
            .unwrap();
        assert_eq!(r.label, InstanceLabel::Yes);
        assert!(r.entries.iter().all(|e| e.summary.successes == 0));
        assert!(r.passed());
        assert_eq!(r.rows()[1].strategy, "uniform:3000");
    }

    #[test]
    fn unpromised_instance_rejected() {
        assert!(adversary_experiment(inputs(3000), 1.0 / 3.0, 0.0, 0.5, &[0], 10, 1).is_err());
    }

    #[test]
    fn same_seed_same_counts() {
        let a = adversary_experiment(inputs(900), 1.0 / 3.0, 0.05, 1.0 / 3.0, &[100, 300], 200, 9)
            .unwrap();
        let b =
            adversary_experiment(inputs(900), 1.0 / 3.0, 0.05, 1.0 / 3.0, &[300], 200, 9).unwrap();
        assert_eq!(
            a.entries[1].summary.successes,
            b.entries[0].summary.successes
        );
    }

    #[test]
    fn lemma_point_regime() {
        let p = LemmaPoint::new(88_420, 0.25, 0.2, 0.5, None).unwrap();
        assert!(p.in_regime() && p.a >= 100.0);
        assert!(LemmaPoint::new(88_419, 0.25, 0.2, 0.5, None).is_err());
        let wide = LemmaPoint::new(88_420, 0.25, 0.2, 0.5, Some(0.2)).unwrap();
        assert!(!wide.in_regime());
        assert!(lemma_validation(&[wide], None, &[], 10, 1, false).is_err());
        assert!(lemma_validation(&[p], None, &[30], 10, 1, false).is_err());
    }

    #[test]
    fn lemma_small_run() {
        let p = LemmaPoint::new(22_105, 0.25, 0.2, 0.0, None).unwrap();
        let strategies = [AdversaryStrategy::EmptySet, AdversaryStrategy::FullSet];
        let r = lemma_validation(&[p], Some(&strategies), &[8], 50, 3, false).unwrap();
        assert!(r.passed());
        assert_eq!(
            r.rows.iter().filter(|r| r.extrapolation).count(),
            decile_sizes(8).len() - 2
        );
        assert!(r
            .rows
            .iter()
            .filter(|r| r.extrapolation)
            .all(|r| r.pass().is_none()));
    }
}
